#pragma once

// Hierarchical recursive encoder. Every internal node p is embedded as
//
//   x_p = mean over positions i of [ fwdGRU(children)_i  ++  bwdGRU(children)_i ]
//
// where the backward GRU runs over the children right to left and its state
// at position i is the one produced after reading child i. Which Bi-GRU is
// used at a node depends on the sharing mode:
//
//   unified             one Bi-GRU everywhere
//   level_specific      one per linguistic level of the child (syntax/discourse)
//   attribute_specific  one per label of the parent (plus an UNK per level)
//
// The document embedding h_D is the root embedding, classified by a two-way
// softmax. Ablation modes replace parts of the recursion with plain means.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hero/embed.hpp"
#include "hero/ling_tree.hpp"
#include "hero/rng.hpp"
#include "hero/tensor_nn.hpp"

namespace hero {

enum class SharingMode { UNIFIED, LEVEL_SPECIFIC, ATTRIBUTE_SPECIFIC };
enum class AblationMode { FULL, NO_DISCOURSE, NO_SYNTAX, NO_STRUCTURE };

inline constexpr SharingMode kAllSharingModes[] = {SharingMode::UNIFIED, SharingMode::LEVEL_SPECIFIC,
                                                   SharingMode::ATTRIBUTE_SPECIFIC};
inline constexpr AblationMode kAllAblationModes[] = {AblationMode::FULL, AblationMode::NO_DISCOURSE,
                                                     AblationMode::NO_SYNTAX, AblationMode::NO_STRUCTURE};

const char* to_string(SharingMode mode);
const char* to_string(AblationMode mode);
// Accepts the to_string spelling; throws std::invalid_argument otherwise.
SharingMode parse_sharing_mode(std::string_view s);
AblationMode parse_ablation_mode(std::string_view s);

class ModelError : public std::runtime_error {
 public:
  enum class Kind { DimMismatch, MissingTrace, UnknownKey };
  ModelError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

namespace keys {
inline const std::string kUnified = "unified";
inline const std::string kSyntax = "syntax";
inline const std::string kDiscourse = "discourse";
inline const std::string kUnkSyntax = "syntax:<unk>";
inline const std::string kUnkRR = "rr:<unk>";
std::string syntax_attr(std::string_view label);
std::string rr_attr(std::string_view label);
}  // namespace keys

// Syntax and relation labels seen in training data, sorted and unique.
struct AttributeVocab {
  std::vector<std::string> syntax;
  std::vector<std::string> rr;

  void add(const TreeNode& node);
  void finalize();
  bool has_syntax(std::string_view label) const;
  bool has_rr(std::string_view label) const;

  friend bool operator==(const AttributeVocab&, const AttributeVocab&) = default;
};

AttributeVocab build_attribute_vocab(std::span<const LingTree* const> trees);

struct BiGru {
  GruParams fwd, bwd;
  friend bool operator==(const BiGru& a, const BiGru& b) { return a.fwd == b.fwd && a.bwd == b.bwd; }
};

// The learnable set: one Bi-GRU per aggregator key plus the classifier.
// Also used to hold gradients of the same shape.
struct ParamSet {
  std::map<std::string, BiGru> registry;
  ClassifierParams classifier;

  std::size_t size() const;
  ParamSet zeros_like() const;
  ParamSet& operator+=(const ParamSet& o);

  // Flat layout: registry in key order, each fwd then bwd in GruParams order,
  // then classifier W (row-major) and b.
  std::vector<double> flatten() const;
  void unflatten(std::span<const double> flat);

  friend bool operator==(const ParamSet& a, const ParamSet& b) {
    return a.registry == b.registry && a.classifier == b.classifier;
  }
};

struct ModelConfig {
  SharingMode mode = SharingMode::UNIFIED;
  AblationMode ablation = AblationMode::FULL;
  int d = 100;
};

struct ModelParams {
  ModelConfig config;
  AttributeVocab vocab;
  ParamSet params;

  // Registry gets exactly the keys the sharing mode requires, each entry
  // drawn from rng in key order, then the classifier.
  static ModelParams init(const ModelConfig& config, AttributeVocab vocab, Rng& rng,
                          bool zero_classifier = false);
  static ModelParams zeros(const ModelConfig& config, AttributeVocab vocab);
};

std::vector<std::string> registry_keys(SharingMode mode, const AttributeVocab& vocab);

// Attribute of a parent node: its own label, except an EDU which takes the
// label of its syntactic root.
std::string_view attribute_of(const TreeNode& node);

const std::string& select_aggregator(const ModelParams& model, const TreeNode& parent, const TreeNode& child);

// Flattened computation graph of one document, children before parents.
struct TraceNode {
  enum class Op { Leaf, BiGru, Mean };
  Op op = Op::Leaf;
  std::vector<int> children;
  std::string key;  // BiGru only
  GruTrace fwd, bwd;
  Vec x;
};

struct DocumentEncoding {
  Vec h_D;
  std::vector<TraceNode> trace;  // root is trace.back()
  std::size_t oov = 0;
};

DocumentEncoding encode_document(const ModelParams& model, const LingTree& tree, const EmbeddingTable& table);
double predict(const ModelParams& model, const DocumentEncoding& enc);
double predict(const ModelParams& model, const LingTree& tree, const EmbeddingTable& table);

struct LossAndGrad {
  double p_fake;
  double loss;
  ParamSet grads;
};

ParamSet backward(const ModelParams& model, const DocumentEncoding& enc, int y);
LossAndGrad loss_and_gradients(const ModelParams& model, const LingTree& tree, const EmbeddingTable& table,
                               int y);
double document_loss(const ModelParams& model, const LingTree& tree, const EmbeddingTable& table, int y);

std::size_t param_count(const ModelParams& model);
// Closed form for a registry of `keys` Bi-GRUs at dimension d.
std::size_t param_count(int d, std::size_t keys);

// Scores many documents. The OpenMP version gives the same numbers as the
// serial one; each document is independent.
std::vector<double> predict_batch(const ModelParams& model, std::span<const LingTree* const> trees,
                                  const EmbeddingTable& table);
std::vector<double> predict_batch_serial(const ModelParams& model, std::span<const LingTree* const> trees,
                                         const EmbeddingTable& table);

}  // namespace hero
