#include "hero/model.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace hero {

const char* to_string(SharingMode mode) {
  switch (mode) {
    case SharingMode::UNIFIED: return "unified";
    case SharingMode::LEVEL_SPECIFIC: return "level_specific";
    case SharingMode::ATTRIBUTE_SPECIFIC: return "attribute_specific";
  }
  return "?";
}

const char* to_string(AblationMode mode) {
  switch (mode) {
    case AblationMode::FULL: return "full";
    case AblationMode::NO_DISCOURSE: return "no_discourse";
    case AblationMode::NO_SYNTAX: return "no_syntax";
    case AblationMode::NO_STRUCTURE: return "no_structure";
  }
  return "?";
}

SharingMode parse_sharing_mode(std::string_view s) {
  for (auto m : kAllSharingModes)
    if (s == to_string(m)) return m;
  throw std::invalid_argument("unknown sharing mode '" + std::string(s) +
                              "' (expected unified, level_specific or attribute_specific)");
}

AblationMode parse_ablation_mode(std::string_view s) {
  for (auto m : kAllAblationModes)
    if (s == to_string(m)) return m;
  throw std::invalid_argument("unknown ablation mode '" + std::string(s) +
                              "' (expected full, no_discourse, no_syntax or no_structure)");
}

namespace keys {
std::string syntax_attr(std::string_view label) { return "syntax:" + std::string(label); }
std::string rr_attr(std::string_view label) { return "rr:" + std::string(label); }
}  // namespace keys

void AttributeVocab::add(const TreeNode& node) {
  if (node.kind == NodeKind::SYNTAX) syntax.push_back(node.label);
  if (node.kind == NodeKind::RR) rr.push_back(node.label);
  for (const auto& c : node.children) add(c);
}

void AttributeVocab::finalize() {
  for (auto* v : {&syntax, &rr}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
}

bool AttributeVocab::has_syntax(std::string_view label) const {
  return std::binary_search(syntax.begin(), syntax.end(), label);
}

bool AttributeVocab::has_rr(std::string_view label) const {
  return std::binary_search(rr.begin(), rr.end(), label);
}

AttributeVocab build_attribute_vocab(std::span<const LingTree* const> trees) {
  AttributeVocab v;
  for (const LingTree* t : trees) v.add(t->root);
  v.finalize();
  return v;
}

std::size_t ParamSet::size() const {
  std::size_t n = classifier.size();
  for (const auto& [key, bi] : registry) n += bi.fwd.size() + bi.bwd.size();
  return n;
}

ParamSet ParamSet::zeros_like() const {
  ParamSet out;
  for (const auto& [key, bi] : registry) {
    int d = bi.fwd.input_dim();
    out.registry.emplace(key, BiGru{GruParams::zeros(d), GruParams::zeros(d)});
  }
  out.classifier = ClassifierParams::zeros(static_cast<int>(classifier.W.cols()));
  return out;
}

ParamSet& ParamSet::operator+=(const ParamSet& o) {
  for (const auto& [key, bi] : o.registry) {
    auto it = registry.find(key);
    if (it == registry.end()) throw ModelError(ModelError::Kind::UnknownKey, "no aggregator '" + key + "'");
    it->second.fwd += bi.fwd;
    it->second.bwd += bi.bwd;
  }
  classifier += o.classifier;
  return *this;
}

namespace {

template <class M, class F>
void rows_major(M& m, F&& f) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) f(m(i, j));
}

template <class PS, class F>
void visit_scalars(PS& ps, F&& f) {
  for (auto& [key, bi] : ps.registry) {
    bi.fwd.for_each([&](const char*, auto& m) { rows_major(m, f); });
    bi.bwd.for_each([&](const char*, auto& m) { rows_major(m, f); });
  }
  rows_major(ps.classifier.W, f);
  rows_major(ps.classifier.b, f);
}

}  // namespace

std::vector<double> ParamSet::flatten() const {
  std::vector<double> out;
  out.reserve(size());
  visit_scalars(*this, [&](double v) { out.push_back(v); });
  return out;
}

void ParamSet::unflatten(std::span<const double> flat) {
  if (flat.size() != size()) throw ShapeMismatch("unflatten: flat vector has the wrong length");
  std::size_t i = 0;
  visit_scalars(*this, [&](double& v) { v = flat[i++]; });
}

std::vector<std::string> registry_keys(SharingMode mode, const AttributeVocab& vocab) {
  switch (mode) {
    case SharingMode::UNIFIED: return {keys::kUnified};
    case SharingMode::LEVEL_SPECIFIC: return {keys::kDiscourse, keys::kSyntax};
    case SharingMode::ATTRIBUTE_SPECIFIC: {
      std::vector<std::string> out;
      for (const auto& l : vocab.syntax) out.push_back(keys::syntax_attr(l));
      for (const auto& l : vocab.rr) out.push_back(keys::rr_attr(l));
      out.push_back(keys::kUnkSyntax);
      out.push_back(keys::kUnkRR);
      std::sort(out.begin(), out.end());
      return out;
    }
  }
  return {};
}

namespace {

void check_config(const ModelConfig& config) {
  if (config.d <= 0 || config.d % 2 != 0)
    throw ModelError(ModelError::Kind::DimMismatch, "model dimension must be positive and even");
}

}  // namespace

ModelParams ModelParams::init(const ModelConfig& config, AttributeVocab vocab, Rng& rng, bool zero_classifier) {
  check_config(config);
  ModelParams m{config, std::move(vocab), {}};
  for (const auto& key : registry_keys(config.mode, m.vocab)) {
    GruParams fwd = GruParams::random(config.d, rng);
    GruParams bwd = GruParams::random(config.d, rng);
    m.params.registry.emplace(key, BiGru{std::move(fwd), std::move(bwd)});
  }
  m.params.classifier =
      zero_classifier ? ClassifierParams::zeros(config.d) : ClassifierParams::random(config.d, rng);
  return m;
}

ModelParams ModelParams::zeros(const ModelConfig& config, AttributeVocab vocab) {
  check_config(config);
  ModelParams m{config, std::move(vocab), {}};
  for (const auto& key : registry_keys(config.mode, m.vocab))
    m.params.registry.emplace(key, BiGru{GruParams::zeros(config.d), GruParams::zeros(config.d)});
  m.params.classifier = ClassifierParams::zeros(config.d);
  return m;
}

std::string_view attribute_of(const TreeNode& node) {
  if (node.kind == NodeKind::EDU && !node.children.empty()) return node.children.front().label;
  return node.label;
}

const std::string& select_aggregator(const ModelParams& model, const TreeNode& parent, const TreeNode& child) {
  std::string key;
  switch (model.config.mode) {
    case SharingMode::UNIFIED: key = keys::kUnified; break;
    case SharingMode::LEVEL_SPECIFIC:
      key = child.level() == Level::SYNTAX ? keys::kSyntax : keys::kDiscourse;
      break;
    case SharingMode::ATTRIBUTE_SPECIFIC: {
      std::string_view attr = attribute_of(parent);
      if (parent.kind == NodeKind::RR)
        key = model.vocab.has_rr(attr) ? keys::rr_attr(attr) : keys::kUnkRR;
      else
        key = model.vocab.has_syntax(attr) ? keys::syntax_attr(attr) : keys::kUnkSyntax;
      break;
    }
  }
  auto it = model.params.registry.find(key);
  if (it == model.params.registry.end())
    throw ModelError(ModelError::Kind::UnknownKey, "registry has no aggregator '" + key + "'");
  return it->first;
}

namespace {

class Encoder {
 public:
  Encoder(const ModelParams& model, const EmbeddingTable& table, DocumentEncoding& out)
      : model_(model), table_(table), out_(out) {}

  int run(const LingTree& tree) {
    switch (model_.config.ablation) {
      case AblationMode::FULL: return full(tree.root);
      case AblationMode::NO_DISCOURSE: {
        std::vector<int> edus;
        collect_edus(tree.root, edus);
        return mean(std::move(edus));
      }
      case AblationMode::NO_SYNTAX: return flat_edus(tree.root);
      case AblationMode::NO_STRUCTURE: {
        std::vector<int> leaves;
        collect_leaves(tree.root, leaves);
        return mean(std::move(leaves));
      }
    }
    return -1;
  }

 private:
  int push(TraceNode node) {
    out_.trace.push_back(std::move(node));
    return static_cast<int>(out_.trace.size()) - 1;
  }

  int leaf(const TreeNode& word) {
    TraceNode n;
    n.op = TraceNode::Op::Leaf;
    n.x = table_.lookup(word.label, &out_.oov);
    return push(std::move(n));
  }

  int full(const TreeNode& node) {
    if (node.kind == NodeKind::WORD) return leaf(node);
    std::vector<int> kids;
    kids.reserve(node.children.size());
    for (const auto& c : node.children) kids.push_back(full(c));
    return bigru(node, std::move(kids));
  }

  void collect_edus(const TreeNode& node, std::vector<int>& out) {
    if (node.kind == NodeKind::EDU) {
      out.push_back(full(node));
      return;
    }
    for (const auto& c : node.children) collect_edus(c, out);
  }

  void collect_leaves(const TreeNode& node, std::vector<int>& out) {
    if (node.kind == NodeKind::WORD) {
      out.push_back(leaf(node));
      return;
    }
    for (const auto& c : node.children) collect_leaves(c, out);
  }

  int flat_edus(const TreeNode& node) {
    if (node.kind == NodeKind::EDU) {
      std::vector<int> leaves;
      collect_leaves(node, leaves);
      return mean(std::move(leaves));
    }
    std::vector<int> kids;
    for (const auto& c : node.children) kids.push_back(flat_edus(c));
    return bigru(node, std::move(kids));
  }

  int mean(std::vector<int> kids) {
    TraceNode n;
    n.op = TraceNode::Op::Mean;
    n.x = Vec::Zero(model_.config.d);
    for (int k : kids) n.x += out_.trace[static_cast<std::size_t>(k)].x;
    n.x /= static_cast<double>(kids.size());
    n.children = std::move(kids);
    return push(std::move(n));
  }

  int bigru(const TreeNode& parent, std::vector<int> kids) {
    TraceNode n;
    n.op = TraceNode::Op::BiGru;
    n.key = select_aggregator(model_, parent, parent.children.front());
    const BiGru& bi = model_.params.registry.at(n.key);

    std::vector<Vec> inputs;
    inputs.reserve(kids.size());
    for (int k : kids) inputs.push_back(out_.trace[static_cast<std::size_t>(k)].x);
    n.fwd = gru_forward(bi.fwd, inputs);
    std::reverse(inputs.begin(), inputs.end());
    n.bwd = gru_forward(bi.bwd, inputs);

    const int half = model_.config.d / 2;
    const double count = static_cast<double>(kids.size());
    Vec f = Vec::Zero(half), b = Vec::Zero(half);
    for (const auto& h : n.fwd.h) f += h;
    for (const auto& h : n.bwd.h) b += h;
    n.x.resize(model_.config.d);
    n.x << f / count, b / count;
    n.children = std::move(kids);
    return push(std::move(n));
  }

  const ModelParams& model_;
  const EmbeddingTable& table_;
  DocumentEncoding& out_;
};

}  // namespace

DocumentEncoding encode_document(const ModelParams& model, const LingTree& tree, const EmbeddingTable& table) {
  if (table.dim() != model.config.d)
    throw ModelError(ModelError::Kind::DimMismatch, "embedding dimension " + std::to_string(table.dim()) +
                                                        " does not match model dimension " +
                                                        std::to_string(model.config.d));
  DocumentEncoding enc;
  Encoder(model, table, enc).run(tree);
  enc.h_D = enc.trace.back().x;
  return enc;
}

double predict(const ModelParams& model, const DocumentEncoding& enc) {
  return softmax_fake(model.params.classifier, enc.h_D);
}

double predict(const ModelParams& model, const LingTree& tree, const EmbeddingTable& table) {
  return predict(model, encode_document(model, tree, table));
}

ParamSet backward(const ModelParams& model, const DocumentEncoding& enc, int y) {
  if (enc.trace.empty() || enc.h_D.size() == 0)
    throw ModelError(ModelError::Kind::MissingTrace, "backward needs an encoding with its trace");
  const int d = model.config.d;
  const int half = d / 2;

  ParamSet grads = model.params.zeros_like();
  ClassifierBackward top = softmax_ce_backward(model.params.classifier, enc.h_D, y);
  grads.classifier = std::move(top.grads);

  std::vector<Vec> dx(enc.trace.size(), Vec::Zero(d));
  dx.back() = std::move(top.grad_h);

  for (std::size_t i = enc.trace.size(); i-- > 0;) {
    const TraceNode& node = enc.trace[i];
    const double count = static_cast<double>(node.children.size());
    switch (node.op) {
      case TraceNode::Op::Leaf: break;  // embeddings are frozen
      case TraceNode::Op::Mean:
        for (int c : node.children) dx[static_cast<std::size_t>(c)] += dx[i] / count;
        break;
      case TraceNode::Op::BiGru: {
        const BiGru& bi = model.params.registry.at(node.key);
        BiGru& g = grads.registry.at(node.key);
        const std::size_t k = node.children.size();

        std::vector<Vec> up_f(k, dx[i].head(half) / count);
        GruBackward bf = gru_backward(bi.fwd, node.fwd, up_f);
        g.fwd += bf.grads;
        for (std::size_t j = 0; j < k; ++j) dx[static_cast<std::size_t>(node.children[j])] += bf.grad_x[j];

        std::vector<Vec> up_b(k, dx[i].tail(half) / count);
        GruBackward bb = gru_backward(bi.bwd, node.bwd, up_b);
        g.bwd += bb.grads;
        for (std::size_t j = 0; j < k; ++j)
          dx[static_cast<std::size_t>(node.children[k - 1 - j])] += bb.grad_x[j];
        break;
      }
    }
  }
  return grads;
}

LossAndGrad loss_and_gradients(const ModelParams& model, const LingTree& tree, const EmbeddingTable& table,
                               int y) {
  DocumentEncoding enc = encode_document(model, tree, table);
  SoftmaxResult r = softmax_ce(model.params.classifier, enc.h_D, y);
  return {r.p_fake, r.loss, backward(model, enc, y)};
}

double document_loss(const ModelParams& model, const LingTree& tree, const EmbeddingTable& table, int y) {
  return softmax_ce(model.params.classifier, encode_document(model, tree, table).h_D, y).loss;
}

std::size_t param_count(const ModelParams& model) { return model.params.size(); }

std::size_t param_count(int d, std::size_t keys) {
  const std::size_t k = static_cast<std::size_t>(d / 2);
  const std::size_t gru = 3 * (k * static_cast<std::size_t>(d) + k * k);
  return keys * 2 * gru + 2 * static_cast<std::size_t>(d) + 2;
}

std::vector<double> predict_batch_serial(const ModelParams& model, std::span<const LingTree* const> trees,
                                         const EmbeddingTable& table) {
  std::vector<double> out(trees.size());
  for (std::size_t i = 0; i < trees.size(); ++i) out[i] = predict(model, *trees[i], table);
  return out;
}

std::vector<double> predict_batch(const ModelParams& model, std::span<const LingTree* const> trees,
                                  const EmbeddingTable& table) {
  std::vector<double> out(trees.size());
  const long n = static_cast<long>(trees.size());
  // Exceptions cannot cross the parallel region; keep the first and rethrow.
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = predict(model, *trees[static_cast<std::size_t>(i)], table);
    } catch (...) {
#pragma omp critical(hero_predict_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace hero
