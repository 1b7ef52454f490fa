#include "hero/ling_tree.hpp"

#include <cctype>

namespace hero {

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::RR: return "RR";
    case NodeKind::EDU: return "EDU";
    case NodeKind::SYNTAX: return "SYNTAX";
    case NodeKind::WORD: return "WORD";
  }
  return "?";
}

const char* to_string(Level level) {
  return level == Level::DISCOURSE ? "discourse" : "syntax";
}

const char* to_string(TreeError::Kind kind) {
  switch (kind) {
    case TreeError::Kind::UnbalancedParens: return "UnbalancedParens";
    case TreeError::Kind::EmptyNode: return "EmptyNode";
    case TreeError::Kind::KindViolation: return "KindViolation";
    case TreeError::Kind::UnknownRRPrefix: return "UnknownRRPrefix";
  }
  return "?";
}

TreeError::TreeError(Kind kind, std::size_t offset, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), offset_(offset) {}

bool has_nuclearity_prefix(std::string_view label) {
  if (label.size() < 4 || label[2] != '-') return false;
  auto prefix = label.substr(0, 2);
  return prefix == "NN" || prefix == "NS" || prefix == "SN";
}

namespace {

// Two letters, a dash, then a lowercase relation name: shaped like a
// rhetorical relation but with a nuclearity prefix we do not know.
bool looks_like_relation(std::string_view label) {
  return label.size() >= 4 && std::isalpha(static_cast<unsigned char>(label[0])) &&
         std::isalpha(static_cast<unsigned char>(label[1])) && label[2] == '-' &&
         std::islower(static_cast<unsigned char>(label[3]));
}

bool is_atom_char(char c) {
  return c != '(' && c != ')' && !std::isspace(static_cast<unsigned char>(c));
}

bool valid_label_text(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!is_atom_char(c)) return false;
  return true;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  TreeNode parse_root() {
    skip_ws();
    if (pos_ >= text_.size()) throw TreeError(TreeError::Kind::EmptyNode, pos_, "empty input");
    if (text_[pos_] != '(')
      throw TreeError(TreeError::Kind::UnbalancedParens, pos_, "expected '(' at start of tree");
    TreeNode root = parse_node();
    skip_ws();
    if (pos_ < text_.size()) {
      if (text_[pos_] == ')')
        throw TreeError(TreeError::Kind::UnbalancedParens, pos_, "unmatched ')'");
      throw TreeError(TreeError::Kind::UnbalancedParens, pos_, "trailing input after root node");
    }
    return root;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void eof() {
    throw TreeError(TreeError::Kind::UnbalancedParens, pos_, "unexpected end of input, missing ')'");
  }

  std::string_view atom() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_atom_char(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  TreeNode parse_node() {
    std::size_t open = pos_;
    ++pos_;  // '('
    skip_ws();
    if (pos_ >= text_.size()) eof();
    if (text_[pos_] == ')' || text_[pos_] == '(')
      throw TreeError(TreeError::Kind::EmptyNode, open, "node without a label");

    std::size_t label_pos = pos_;
    TreeNode node;
    node.label = std::string(atom());
    if (looks_like_relation(node.label) && !has_nuclearity_prefix(node.label))
      throw TreeError(TreeError::Kind::UnknownRRPrefix, label_pos,
                      "relation label '" + node.label + "' lacks an NN-/NS-/SN- prefix");
    node.kind = classify_label(node.label);

    skip_ws();
    if (pos_ >= text_.size()) eof();
    if (text_[pos_] == ')')
      throw TreeError(TreeError::Kind::EmptyNode, open, "node '" + node.label + "' has no children");

    if (text_[pos_] != '(') {
      TreeNode word;
      word.label = std::string(atom());
      word.kind = NodeKind::WORD;
      node.children.push_back(std::move(word));
      skip_ws();
      if (pos_ >= text_.size()) eof();
      if (text_[pos_] != ')')
        throw TreeError(TreeError::Kind::KindViolation, pos_,
                        "token under '" + node.label + "' must be its only child");
      ++pos_;
      return node;
    }

    while (true) {
      skip_ws();
      if (pos_ >= text_.size()) eof();
      char c = text_[pos_];
      if (c == ')') {
        ++pos_;
        return node;
      }
      if (c != '(')
        throw TreeError(TreeError::Kind::KindViolation, pos_,
                        "bare token mixed with child nodes under '" + node.label + "'");
      node.children.push_back(parse_node());
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void violation(const std::string& msg) { throw TreeError(TreeError::Kind::KindViolation, 0, msg); }

void validate_node(const TreeNode& node) {
  if (!valid_label_text(node.label))
    throw TreeError(TreeError::Kind::EmptyNode, 0, "empty label or label with whitespace/parentheses");

  switch (node.kind) {
    case NodeKind::WORD:
      if (!node.children.empty()) violation("word '" + node.label + "' has children");
      return;
    case NodeKind::RR:
      if (!has_nuclearity_prefix(node.label))
        throw TreeError(TreeError::Kind::UnknownRRPrefix, 0, "relation '" + node.label + "'");
      if (node.children.empty())
        throw TreeError(TreeError::Kind::EmptyNode, 0, "relation '" + node.label + "' has no children");
      for (const auto& c : node.children)
        if (c.kind != NodeKind::RR && c.kind != NodeKind::EDU)
          violation(std::string(to_string(c.kind)) + " node '" + c.label + "' under relation '" +
                    node.label + "'");
      break;
    case NodeKind::EDU:
      if (node.label != "EDU") violation("EDU node labelled '" + node.label + "'");
      if (node.children.size() != 1 || node.children[0].kind != NodeKind::SYNTAX)
        violation("EDU must have exactly one syntax root child");
      break;
    case NodeKind::SYNTAX:
      if (node.label == "EDU" || has_nuclearity_prefix(node.label))
        violation("syntax node labelled '" + node.label + "'");
      if (node.children.empty())
        throw TreeError(TreeError::Kind::EmptyNode, 0, "syntax node '" + node.label + "' has no children");
      if (node.children[0].kind == NodeKind::WORD) {
        if (node.children.size() != 1)
          violation("word under '" + node.label + "' must be its only child");
      } else {
        for (const auto& c : node.children)
          if (c.kind != NodeKind::SYNTAX)
            violation(std::string(to_string(c.kind)) + " node '" + c.label + "' under syntax node '" +
                      node.label + "'");
      }
      break;
  }
  for (const auto& c : node.children) validate_node(c);
}

void write_node(const TreeNode& node, std::string& out) {
  if (node.kind == NodeKind::WORD) {
    out += node.label;
    return;
  }
  out += '(';
  out += node.label;
  for (const auto& c : node.children) {
    out += ' ';
    write_node(c, out);
  }
  out += ')';
}

void collect_leaves(const TreeNode& node, std::vector<std::string>& out) {
  if (node.kind == NodeKind::WORD) {
    out.push_back(node.label);
    return;
  }
  for (const auto& c : node.children) collect_leaves(c, out);
}

TreeNode prune_to_discourse(const TreeNode& node, std::vector<TreeNode>& syntax) {
  TreeNode out{node.label, node.kind, {}};
  if (node.kind == NodeKind::EDU) {
    syntax.push_back(node.children.front());
    return out;
  }
  for (const auto& c : node.children) out.children.push_back(prune_to_discourse(c, syntax));
  return out;
}

}  // namespace

NodeKind classify_label(std::string_view label) {
  if (label == "EDU") return NodeKind::EDU;
  if (has_nuclearity_prefix(label)) return NodeKind::RR;
  return NodeKind::SYNTAX;
}

LingTree parse_sexpr(std::string_view text, std::string doc_id) {
  Parser parser(text);
  LingTree tree{parser.parse_root(), std::move(doc_id)};
  validate(tree);
  return tree;
}

void validate(const LingTree& tree) {
  if (tree.root.kind != NodeKind::RR && tree.root.kind != NodeKind::EDU)
    violation(std::string("root must be an RR or EDU node, got ") + to_string(tree.root.kind) + " '" +
              tree.root.label + "'");
  validate_node(tree.root);
}

std::string serialize_sexpr(const TreeNode& node) {
  std::string out;
  write_node(node, out);
  return out;
}

std::string serialize_sexpr(const LingTree& tree) { return serialize_sexpr(tree.root); }

std::pair<DiscourseView, SyntaxSubtrees> derive_views(const LingTree& tree) {
  SyntaxSubtrees syntax;
  DiscourseView discourse{prune_to_discourse(tree.root, syntax.trees)};
  return {std::move(discourse), std::move(syntax)};
}

std::vector<std::string> leaf_words(const TreeNode& node) {
  std::vector<std::string> out;
  collect_leaves(node, out);
  return out;
}

std::vector<std::string> leaf_words(const LingTree& tree) { return leaf_words(tree.root); }

std::size_t count_nodes(const TreeNode& node) {
  std::size_t n = 1;
  for (const auto& c : node.children) n += count_nodes(c);
  return n;
}

std::size_t count_kind(const TreeNode& node, NodeKind kind) {
  std::size_t n = node.kind == kind ? 1 : 0;
  for (const auto& c : node.children) n += count_kind(c, kind);
  return n;
}

std::string unescape_token(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  for (std::size_t i = 0; i < token.size();) {
    if (token.substr(i, 5) == "-LRB-") {
      out += '(';
      i += 5;
    } else if (token.substr(i, 5) == "-RRB-") {
      out += ')';
      i += 5;
    } else {
      out += token[i++];
    }
  }
  return out;
}

std::string escape_token(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == '(')
      out += "-LRB-";
    else if (c == ')')
      out += "-RRB-";
    else
      out += c;
  }
  return out;
}

}  // namespace hero
