#pragma once

// Seeded generators for random hierarchical trees, embedding tables and
// labelled corpora. Used by tests, the gradcheck command and the benchmark.

#include <string>
#include <vector>

#include "hero/dataset.hpp"
#include "hero/embed.hpp"
#include "hero/ling_tree.hpp"
#include "hero/rng.hpp"

namespace hero::synth {

struct TreeShape {
  int num_edus = 3;
  int max_rr_arity = 2;      // relations get 2..max_rr_arity children
  int max_syntax_arity = 3;  // phrases get 1..max_syntax_arity children
  int max_syntax_depth = 3;  // phrase nesting below the EDU root
  double phrase_prob = 0.4;  // chance a phrase child is another phrase rather than a preterminal
  std::vector<std::string> rr_labels = {"NS-elaboration", "NN-joint", "SN-attribution", "NS-explanation",
                                        "NN-contrast"};
  std::vector<std::string> phrase_labels = {"S", "NP", "VP", "PP", "SBAR", "ADJP"};
  std::vector<std::string> pos_labels = {"NN", "NNS", "NNP", "VB", "VBD", "DT", "IN", "JJ"};
  std::vector<std::string> vocab;  // empty: "w0".."w49"
};

std::vector<std::string> default_vocab(int size = 50);

LingTree random_tree(Rng& rng, const TreeShape& shape = {});
TreeNode random_syntax_tree(Rng& rng, const TreeShape& shape);

// Entries drawn uniformly from [-scale, scale].
EmbeddingTable random_table(const std::vector<std::string>& vocab, int dim, Rng& rng, double scale = 1.0);

// Fake documents carry `marker` at one random leaf; true documents never do.
struct MarkerCorpus {
  std::vector<LabeledDocument> docs;
  EmbeddingTable table;
};
MarkerCorpus marker_corpus(int num_docs, int dim, std::uint64_t seed, const std::string& marker = "MARKER");

// Fake trees are built with wider syntax arity than true trees.
std::vector<LabeledDocument> arity_corpus(int per_group, std::uint64_t seed, int true_arity = 2,
                                          int fake_arity = 4);

}  // namespace hero::synth
