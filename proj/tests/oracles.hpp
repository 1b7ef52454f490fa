#pragma once

// Slow, independent re-implementations used as test oracles. Nothing here
// calls into the numeric code under test; parameters are only read.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "hero/embed.hpp"
#include "hero/ling_tree.hpp"
#include "hero/metrics.hpp"
#include "hero/model.hpp"

namespace oracle {

using V = std::vector<double>;

inline double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

inline V mat_times(const hero::Mat& m, const V& x) {
  V y(static_cast<std::size_t>(m.rows()), 0.0);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) y[i] += m(i, j) * x[j];
  return y;
}

// One GRU step.
inline V gru_step(const hero::GruParams& p, const V& x, const V& h) {
  const std::size_t k = h.size();
  V wr = mat_times(p.W_r, x), ur = mat_times(p.U_r, h);
  V wz = mat_times(p.W_z, x), uz = mat_times(p.U_z, h);
  V r(k), z(k), hr(k);
  for (std::size_t i = 0; i < k; ++i) {
    r[i] = sigmoid(wr[i] + ur[i]);
    z[i] = sigmoid(wz[i] + uz[i]);
    hr[i] = h[i] * r[i];
  }
  V wh = mat_times(p.W_h, x), uh = mat_times(p.U_h, hr);
  V out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = (1.0 - z[i]) * h[i] + z[i] * std::tanh(wh[i] + uh[i]);
  return out;
}

inline std::vector<V> gru_states(const hero::GruParams& p, const std::vector<V>& xs) {
  V h(static_cast<std::size_t>(p.W_r.rows()), 0.0);
  std::vector<V> states;
  for (const V& x : xs) {
    h = gru_step(p, x, h);
    states.push_back(h);
  }
  return states;
}

inline V to_v(const hero::Vec& v) { return V(v.data(), v.data() + v.size()); }

inline V average(const std::vector<V>& xs) {
  V out(xs.at(0).size(), 0.0);
  for (const V& x : xs)
    for (std::size_t i = 0; i < x.size(); ++i) out[i] += x[i];
  for (double& v : out) v /= static_cast<double>(xs.size());
  return out;
}

// Key chosen by looking at the parent only.
inline std::string key_for(const hero::ModelParams& m, const hero::TreeNode& parent) {
  using hero::NodeKind;
  using hero::SharingMode;
  switch (m.config.mode) {
    case SharingMode::UNIFIED: return "unified";
    case SharingMode::LEVEL_SPECIFIC: return parent.kind == NodeKind::RR ? "discourse" : "syntax";
    case SharingMode::ATTRIBUTE_SPECIFIC: {
      if (parent.kind == NodeKind::RR) {
        const auto& rr = m.vocab.rr;
        return std::find(rr.begin(), rr.end(), parent.label) != rr.end() ? "rr:" + parent.label : "rr:<unk>";
      }
      const std::string& label = parent.kind == NodeKind::EDU ? parent.children.at(0).label : parent.label;
      const auto& syn = m.vocab.syntax;
      return std::find(syn.begin(), syn.end(), label) != syn.end() ? "syntax:" + label : "syntax:<unk>";
    }
  }
  return {};
}

class Encoder {
 public:
  Encoder(const hero::ModelParams& m, const hero::EmbeddingTable& t) : m_(m), t_(t) {}

  V document(const hero::LingTree& tree) const {
    using hero::AblationMode;
    switch (m_.config.ablation) {
      case AblationMode::FULL: return full(tree.root);
      case AblationMode::NO_DISCOURSE: {
        std::vector<V> edus;
        for_each_edu(tree.root, [&](const hero::TreeNode& e) { edus.push_back(full(e)); });
        return average(edus);
      }
      case AblationMode::NO_SYNTAX: return no_syntax(tree.root);
      case AblationMode::NO_STRUCTURE: return average(words(tree.root));
    }
    return {};
  }

 private:
  template <class F>
  static void for_each_edu(const hero::TreeNode& n, F&& f) {
    if (n.kind == hero::NodeKind::EDU) {
      f(n);
      return;
    }
    for (const auto& c : n.children) for_each_edu(c, f);
  }

  std::vector<V> words(const hero::TreeNode& n) const {
    std::vector<V> out;
    if (n.kind == hero::NodeKind::WORD) {
      out.push_back(to_v(t_.lookup(n.label)));
    } else {
      for (const auto& c : n.children)
        for (V& v : words(c)) out.push_back(v);
    }
    return out;
  }

  V combine(const hero::TreeNode& parent, const std::vector<V>& kids) const {
    const hero::BiGru& bi = m_.params.registry.at(key_for(m_, parent));
    std::vector<V> f = gru_states(bi.fwd, kids);
    std::vector<V> rev(kids.rbegin(), kids.rend());
    std::vector<V> b = gru_states(bi.bwd, rev);
    // bwd state after reading child i sits at position i
    std::vector<V> cat;
    for (std::size_t i = 0; i < kids.size(); ++i) {
      V v = f[i];
      const V& bb = b[kids.size() - 1 - i];
      v.insert(v.end(), bb.begin(), bb.end());
      cat.push_back(v);
    }
    return average(cat);
  }

  V full(const hero::TreeNode& n) const {
    if (n.kind == hero::NodeKind::WORD) return to_v(t_.lookup(n.label));
    std::vector<V> kids;
    for (const auto& c : n.children) kids.push_back(full(c));
    return combine(n, kids);
  }

  V no_syntax(const hero::TreeNode& n) const {
    if (n.kind == hero::NodeKind::EDU) return average(words(n));
    std::vector<V> kids;
    for (const auto& c : n.children) kids.push_back(no_syntax(c));
    return combine(n, kids);
  }

  const hero::ModelParams& m_;
  const hero::EmbeddingTable& t_;
};

inline double p_fake(const hero::ModelParams& m, const V& h) {
  const auto& c = m.params.classifier;
  double l0 = c.b[0], l1 = c.b[1];
  for (std::size_t j = 0; j < h.size(); ++j) {
    l0 += c.W(0, static_cast<int>(j)) * h[j];
    l1 += c.W(1, static_cast<int>(j)) * h[j];
  }
  return 1.0 / (1.0 + std::exp(l0 - l1));
}

// Pairwise AUC, ties at half credit.
inline double auc(const std::vector<int>& y, const std::vector<double>& s) {
  double wins = 0;
  long pairs = 0;
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j)
      if (y[i] == 1 && y[j] == 0) {
        ++pairs;
        wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
  return wins / static_cast<double>(pairs);
}

inline double f1_of_class(const std::vector<int>& y, const std::vector<double>& s, int cls) {
  double tp = 0, pred = 0, actual = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const int p = s[i] >= 0.5 ? 1 : 0;
    if (p == cls) ++pred;
    if (y[i] == cls) ++actual;
    if (p == cls && y[i] == cls) ++tp;
  }
  return pred + actual == 0 ? 0.0 : 2 * tp / (pred + actual);
}

inline double macro_f1(const std::vector<int>& y, const std::vector<double>& s) {
  return (f1_of_class(y, s, 0) + f1_of_class(y, s, 1)) / 2;
}

// Pooled over both classes: sum tp / sum (tp + (fp + fn)/2).
inline double micro_f1(const std::vector<int>& y, const std::vector<double>& s) {
  double tp = 0, fp = 0, fn = 0;
  for (int cls = 0; cls < 2; ++cls)
    for (std::size_t i = 0; i < y.size(); ++i) {
      const int p = s[i] >= 0.5 ? 1 : 0;
      if (p == cls && y[i] == cls) ++tp;
      if (p == cls && y[i] != cls) ++fp;
      if (p != cls && y[i] == cls) ++fn;
    }
  return 2 * tp / (2 * tp + fp + fn);
}

inline double t_density(double x, double nu) {
  const double c = std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2) - 0.5 * std::log(nu * M_PI);
  return std::exp(c - (nu + 1) / 2 * std::log1p(x * x / nu));
}

// Composite Simpson from 0 to |t|.
inline double t_cdf(double t, double nu, int intervals = 20000) {
  const double a = std::fabs(t), h = a / intervals;
  double s = t_density(0, nu) + t_density(a, nu);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4 : 2) * t_density(i * h, nu);
  const double half = s * h / 3;
  return t >= 0 ? 0.5 + half : 0.5 - half;
}

}  // namespace oracle
