#include "hero/synth.hpp"

#include <algorithm>

namespace hero::synth {

namespace {

const std::string& pick(Rng& rng, const std::vector<std::string>& v) {
  return v[static_cast<std::size_t>(rng.below(v.size()))];
}

TreeNode preterminal(Rng& rng, const TreeShape& shape, const std::vector<std::string>& vocab) {
  TreeNode word{pick(rng, vocab), NodeKind::WORD, {}};
  return {pick(rng, shape.pos_labels), NodeKind::SYNTAX, {std::move(word)}};
}

TreeNode phrase(Rng& rng, const TreeShape& shape, const std::vector<std::string>& vocab,
                const std::string& label, int depth) {
  TreeNode node{label, NodeKind::SYNTAX, {}};
  int arity = rng.between(1, std::max(1, shape.max_syntax_arity));
  for (int i = 0; i < arity; ++i) {
    if (depth < shape.max_syntax_depth && rng.uniform() < shape.phrase_prob)
      node.children.push_back(phrase(rng, shape, vocab, pick(rng, shape.phrase_labels), depth + 1));
    else
      node.children.push_back(preterminal(rng, shape, vocab));
  }
  return node;
}

// Splits `edus` (consumed front to back) under a random relation tree.
TreeNode discourse(Rng& rng, const TreeShape& shape, std::vector<TreeNode>& edus, std::size_t& next,
                   int count) {
  if (count == 1) return std::move(edus[next++]);
  int arity = rng.between(2, std::max(2, std::min(shape.max_rr_arity, count)));
  // Random composition of `count` into `arity` positive parts.
  std::vector<int> cuts;
  for (int i = 1; i < count; ++i) cuts.push_back(i);
  rng.shuffle(cuts);
  cuts.resize(static_cast<std::size_t>(arity - 1));
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(count);

  TreeNode node{pick(rng, shape.rr_labels), NodeKind::RR, {}};
  int prev = 0;
  for (int c : cuts) {
    node.children.push_back(discourse(rng, shape, edus, next, c - prev));
    prev = c;
  }
  return node;
}

}  // namespace

std::vector<std::string> default_vocab(int size) {
  std::vector<std::string> v;
  for (int i = 0; i < size; ++i) v.push_back("w" + std::to_string(i));
  return v;
}

TreeNode random_syntax_tree(Rng& rng, const TreeShape& shape) {
  const auto vocab = shape.vocab.empty() ? default_vocab() : shape.vocab;
  return phrase(rng, shape, vocab, "S", 0);
}

LingTree random_tree(Rng& rng, const TreeShape& shape) {
  const int n = std::max(1, shape.num_edus);
  std::vector<TreeNode> edus;
  for (int i = 0; i < n; ++i) edus.push_back({"EDU", NodeKind::EDU, {random_syntax_tree(rng, shape)}});
  std::size_t next = 0;
  return {discourse(rng, shape, edus, next, n), {}};
}

EmbeddingTable random_table(const std::vector<std::string>& vocab, int dim, Rng& rng, double scale) {
  EmbeddingTable table(dim);
  for (const auto& w : vocab) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = rng.uniform(-scale, scale);
    table.insert(w, std::move(v));
  }
  return table;
}

namespace {

std::vector<TreeNode*> word_leaves(TreeNode& node) {
  std::vector<TreeNode*> out;
  std::vector<TreeNode*> stack{&node};
  while (!stack.empty()) {
    TreeNode* n = stack.back();
    stack.pop_back();
    if (n->kind == NodeKind::WORD) out.push_back(n);
    for (auto it = n->children.rbegin(); it != n->children.rend(); ++it) stack.push_back(&*it);
  }
  return out;
}

}  // namespace

MarkerCorpus marker_corpus(int num_docs, int dim, std::uint64_t seed, const std::string& marker) {
  Rng rng(seed);
  TreeShape shape;
  shape.vocab = default_vocab();
  auto vocab = shape.vocab;
  vocab.push_back(marker);
  MarkerCorpus out{{}, random_table(vocab, dim, rng)};
  for (int i = 0; i < num_docs; ++i) {
    shape.num_edus = rng.between(1, 3);
    LabeledDocument doc{"doc" + std::to_string(i), random_tree(rng, shape), i % 2};
    if (doc.y == 1) {
      auto leaves = word_leaves(doc.tree.root);
      leaves[static_cast<std::size_t>(rng.below(leaves.size()))]->label = marker;
    }
    doc.tree.doc_id = doc.id;
    out.docs.push_back(std::move(doc));
  }
  return out;
}

std::vector<LabeledDocument> arity_corpus(int per_group, std::uint64_t seed, int true_arity, int fake_arity) {
  Rng rng(seed);
  std::vector<LabeledDocument> docs;
  for (int i = 0; i < 2 * per_group; ++i) {
    TreeShape shape;
    int y = i % 2;
    shape.num_edus = rng.between(1, 3);
    shape.max_syntax_arity = y == 1 ? fake_arity : true_arity;
    LabeledDocument doc{"doc" + std::to_string(i), random_tree(rng, shape), y};
    doc.tree.doc_id = doc.id;
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace hero::synth
