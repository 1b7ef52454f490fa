#pragma once

// Scalar-loop evaluation of the document loss, templated on the floating
// type. It shares no numeric code with the Eigen kernels and exists for
// gradient checking: with T = long double, central differences of the loss
// are no longer swamped by double rounding on tiny gradients.

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hero/embed.hpp"
#include "hero/ling_tree.hpp"
#include "hero/model.hpp"

namespace hero::reference {

template <class T>
using Vector = std::vector<T>;
template <class T>
using Matrix = std::vector<std::vector<T>>;  // row-major

template <class T>
struct Gru {
  Matrix<T> W_r, W_z, W_h, U_r, U_z, U_h;
};

template <class T>
struct Model {
  const ModelParams* source = nullptr;  // keys, vocab, config
  std::map<std::string, std::pair<Gru<T>, Gru<T>>> registry;
  Matrix<T> W;
  Vector<T> b;
};

template <class T>
Matrix<T> convert(const Mat& m) {
  Matrix<T> out(static_cast<std::size_t>(m.rows()), Vector<T>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = static_cast<T>(m(i, j));
  return out;
}

template <class T>
Gru<T> convert(const GruParams& p) {
  return {convert<T>(p.W_r), convert<T>(p.W_z), convert<T>(p.W_h),
          convert<T>(p.U_r), convert<T>(p.U_z), convert<T>(p.U_h)};
}

template <class T>
Model<T> convert(const ModelParams& m) {
  Model<T> out;
  out.source = &m;
  for (const auto& [key, bi] : m.params.registry) out.registry.emplace(key, std::make_pair(convert<T>(bi.fwd), convert<T>(bi.bwd)));
  out.W = convert<T>(m.params.classifier.W);
  out.b = {static_cast<T>(m.params.classifier.b[0]), static_cast<T>(m.params.classifier.b[1])};
  return out;
}

template <class T>
Vector<T> matvec(const Matrix<T>& m, const Vector<T>& x) {
  Vector<T> y(m.size(), T(0));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += m[i][j] * x[j];
  return y;
}

template <class T>
std::vector<Vector<T>> gru_states(const Gru<T>& g, const std::vector<Vector<T>>& xs) {
  const std::size_t k = g.W_r.size();
  Vector<T> h(k, T(0));
  std::vector<Vector<T>> out;
  for (const auto& x : xs) {
    Vector<T> ar = matvec(g.W_r, x), ur = matvec(g.U_r, h);
    Vector<T> az = matvec(g.W_z, x), uz = matvec(g.U_z, h);
    Vector<T> r(k), z(k), hr(k);
    for (std::size_t i = 0; i < k; ++i) {
      r[i] = T(1) / (T(1) + std::exp(-(ar[i] + ur[i])));
      z[i] = T(1) / (T(1) + std::exp(-(az[i] + uz[i])));
      hr[i] = h[i] * r[i];
    }
    Vector<T> ah = matvec(g.W_h, x), uh = matvec(g.U_h, hr);
    Vector<T> next(k);
    for (std::size_t i = 0; i < k; ++i) next[i] = (T(1) - z[i]) * h[i] + z[i] * std::tanh(ah[i] + uh[i]);
    h = next;
    out.push_back(h);
  }
  return out;
}

template <class T>
class Evaluator {
 public:
  Evaluator(const Model<T>& model, const EmbeddingTable& table) : m_(model), table_(table) {}

  Vector<T> document(const LingTree& tree) const {
    switch (m_.source->config.ablation) {
      case AblationMode::FULL: return node(tree.root);
      case AblationMode::NO_DISCOURSE: {
        std::vector<Vector<T>> edus;
        collect_edus(tree.root, edus);
        return mean(edus);
      }
      case AblationMode::NO_SYNTAX: return flat_edus(tree.root);
      case AblationMode::NO_STRUCTURE: return mean(words(tree.root));
    }
    return {};
  }

 private:
  Vector<T> word(const TreeNode& w) const {
    const Vec& v = table_.lookup(w.label);
    Vector<T> out(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = static_cast<T>(v[i]);
    return out;
  }

  std::vector<Vector<T>> words(const TreeNode& n) const {
    std::vector<Vector<T>> out;
    if (n.kind == NodeKind::WORD) {
      out.push_back(word(n));
      return out;
    }
    for (const auto& c : n.children)
      for (auto& v : words(c)) out.push_back(std::move(v));
    return out;
  }

  static Vector<T> mean(const std::vector<Vector<T>>& xs) {
    Vector<T> out(xs.front().size(), T(0));
    for (const auto& x : xs)
      for (std::size_t i = 0; i < x.size(); ++i) out[i] += x[i];
    for (auto& v : out) v /= static_cast<T>(xs.size());
    return out;
  }

  Vector<T> aggregate(const TreeNode& parent, const std::vector<Vector<T>>& kids) const {
    const auto& key = select_aggregator(*m_.source, parent, parent.children.front());
    const auto& [fwd, bwd] = m_.registry.at(key);
    auto f = gru_states(fwd, kids);
    std::vector<Vector<T>> rev(kids.rbegin(), kids.rend());
    auto b = gru_states(bwd, rev);
    Vector<T> mf = mean(f), mb = mean(b);
    mf.insert(mf.end(), mb.begin(), mb.end());
    return mf;
  }

  Vector<T> node(const TreeNode& n) const {
    if (n.kind == NodeKind::WORD) return word(n);
    std::vector<Vector<T>> kids;
    for (const auto& c : n.children) kids.push_back(node(c));
    return aggregate(n, kids);
  }

  void collect_edus(const TreeNode& n, std::vector<Vector<T>>& out) const {
    if (n.kind == NodeKind::EDU) {
      out.push_back(node(n));
      return;
    }
    for (const auto& c : n.children) collect_edus(c, out);
  }

  Vector<T> flat_edus(const TreeNode& n) const {
    if (n.kind == NodeKind::EDU) return mean(words(n));
    std::vector<Vector<T>> kids;
    for (const auto& c : n.children) kids.push_back(flat_edus(c));
    return aggregate(n, kids);
  }

  const Model<T>& m_;
  const EmbeddingTable& table_;
};

template <class T>
T loss(const Model<T>& model, const LingTree& tree, const EmbeddingTable& table, int y) {
  Vector<T> h = Evaluator<T>(model, table).document(tree);
  Vector<T> logits = matvec(model.W, h);
  logits[0] += model.b[0];
  logits[1] += model.b[1];
  // -log softmax_y, computed as logsumexp - logit_y
  T m = std::max(logits[0], logits[1]);
  T lse = m + std::log(std::exp(logits[0] - m) + std::exp(logits[1] - m));
  return lse - logits[static_cast<std::size_t>(y)];
}

// Loss as a function of the flat parameter vector, evaluated in T and
// reported relative to the loss at `origin` so that the double return value
// keeps T's resolution for small perturbations.
template <class T>
ScalarFn relative_loss_fn(const ModelParams& origin, const LingTree& tree, const EmbeddingTable& table, int y) {
  const T base = loss(convert<T>(origin), tree, table, y);
  return [&origin, &tree, &table, y, base](std::span<const double> theta) {
    ModelParams m = origin;
    m.params.unflatten(theta);
    return static_cast<double>(loss(convert<T>(m), tree, table, y) - base);
  };
}

// Analytic gradients of the production model against central differences of
// the long-double reference loss.
inline GradCheckResult check_document_gradients(const ModelParams& model, const LingTree& tree,
                                                const EmbeddingTable& table, int y, double step = 1e-5) {
  const std::vector<double> theta = model.params.flatten();
  const std::vector<double> analytic = loss_and_gradients(model, tree, table, y).grads.flatten();
  return finite_diff_check(relative_loss_fn<long double>(model, tree, table, y), theta, analytic, step);
}

}  // namespace hero::reference
