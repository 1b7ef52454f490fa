#pragma once

// Hierarchical linguistic tree: discourse structure (rhetorical relations over
// elementary discourse units) stacked on top of per-EDU constituency trees.
//
// File format is a bracketed s-expression:
//
//   node := '(' LABEL ( node+ | TOKEN ) ')'
//
// Node kinds are inferred from labels: "EDU" is an EDU, a label with a
// nuclearity prefix (NN-, NS-, SN-) is a rhetorical relation, a bare token is
// a word, anything else is a syntax label. Literal parentheses inside tokens
// are written -LRB- / -RRB- and are kept in that escaped form in memory.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hero {

enum class NodeKind { RR, EDU, SYNTAX, WORD };
enum class Level { DISCOURSE, SYNTAX };

const char* to_string(NodeKind kind);
const char* to_string(Level level);

class TreeError : public std::runtime_error {
 public:
  enum class Kind { UnbalancedParens, EmptyNode, KindViolation, UnknownRRPrefix };

  TreeError(Kind kind, std::size_t offset, const std::string& what);

  Kind kind() const { return kind_; }
  // Byte offset into the parsed text; 0 for errors raised by validate().
  std::size_t offset() const { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

const char* to_string(TreeError::Kind kind);

struct TreeNode {
  std::string label;
  NodeKind kind = NodeKind::SYNTAX;
  std::vector<TreeNode> children;

  Level level() const {
    return (kind == NodeKind::RR || kind == NodeKind::EDU) ? Level::DISCOURSE : Level::SYNTAX;
  }
  bool is_leaf() const { return children.empty(); }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct LingTree {
  TreeNode root;
  std::string doc_id;

  friend bool operator==(const LingTree&, const LingTree&) = default;
};

// RR and EDU nodes only; EDUs are leaves here.
struct DiscourseView {
  TreeNode root;
};

// One constituency tree per EDU, in document order.
struct SyntaxSubtrees {
  std::vector<TreeNode> trees;
};

// Label classification used by the parser.
bool has_nuclearity_prefix(std::string_view label);
NodeKind classify_label(std::string_view label);

LingTree parse_sexpr(std::string_view text, std::string doc_id = {});
std::string serialize_sexpr(const LingTree& tree);
std::string serialize_sexpr(const TreeNode& node);

// Throws TreeError if any structural invariant is broken.
void validate(const LingTree& tree);

std::pair<DiscourseView, SyntaxSubtrees> derive_views(const LingTree& tree);
std::vector<std::string> leaf_words(const LingTree& tree);
std::vector<std::string> leaf_words(const TreeNode& node);

std::size_t count_nodes(const TreeNode& node);
std::size_t count_kind(const TreeNode& node, NodeKind kind);

// -LRB- / -RRB- <-> ( / )
std::string unescape_token(std::string_view token);
std::string escape_token(std::string_view text);

}  // namespace hero
