#include "hero/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hero {

namespace {

struct LevelWalk {
  std::vector<std::size_t> width;  // nodes per depth
  std::size_t leaves = 0;
  double leaf_depth_sum = 0;
  std::size_t internal = 0;
  std::size_t child_edges = 0;
  std::size_t max_children = 0;
};

void walk(const TreeNode& node, std::size_t depth, LevelWalk& w) {
  if (w.width.size() <= depth) w.width.resize(depth + 1, 0);
  ++w.width[depth];
  if (node.children.empty()) {
    ++w.leaves;
    w.leaf_depth_sum += static_cast<double>(depth);
    return;
  }
  ++w.internal;
  w.child_edges += node.children.size();
  w.max_children = std::max(w.max_children, node.children.size());
  for (const auto& c : node.children) walk(c, depth + 1, w);
}

void count_labels(const TreeNode& node, std::map<std::string, double>& counts) {
  counts[node.kind == NodeKind::WORD ? kWordBucket : node.label] += 1.0;
  for (const auto& c : node.children) count_labels(c, counts);
}

}  // namespace

ShapeStats shape_of(const TreeNode& root) {
  LevelWalk w;
  walk(root, 0, w);
  ShapeStats s;
  for (auto n : w.width) s.size += static_cast<double>(n);
  s.max_width = static_cast<double>(*std::max_element(w.width.begin(), w.width.end()));
  s.depth = static_cast<double>(w.width.size() - 1);
  return s;
}

std::vector<std::pair<std::string, double>> TreeStats::scalars() const {
  return {{"node_count", node_count},
          {"max_width", max_width},
          {"depth", depth},
          {"mean_width", mean_width},
          {"mean_leaf_depth", mean_leaf_depth},
          {"avg_children", avg_children},
          {"max_children", max_children},
          {"leaf_count", leaf_count},
          {"prop_rr", prop_rr},
          {"prop_edu", prop_edu},
          {"prop_syntax", prop_syntax},
          {"prop_word", prop_word},
          {"discourse_size", discourse.size},
          {"discourse_max_width", discourse.max_width},
          {"discourse_depth", discourse.depth},
          {"syntax_mean_size", syntax_mean.size},
          {"syntax_mean_max_width", syntax_mean.max_width},
          {"syntax_mean_depth", syntax_mean.depth},
          {"syntax_max_size", syntax_max.size},
          {"syntax_max_max_width", syntax_max.max_width},
          {"syntax_max_depth", syntax_max.depth}};
}

TreeStats compute_tree_stats(const LingTree& tree) {
  LevelWalk w;
  walk(tree.root, 0, w);
  TreeStats s;
  std::size_t total = 0;
  for (auto n : w.width) total += n;
  s.node_count = static_cast<double>(total);
  s.max_width = static_cast<double>(*std::max_element(w.width.begin(), w.width.end()));
  s.depth = static_cast<double>(w.width.size() - 1);
  s.mean_width = s.node_count / static_cast<double>(w.width.size());
  s.mean_leaf_depth = w.leaf_depth_sum / static_cast<double>(w.leaves);
  s.avg_children = w.internal ? static_cast<double>(w.child_edges) / static_cast<double>(w.internal) : 0.0;
  s.max_children = static_cast<double>(w.max_children);
  s.leaf_count = static_cast<double>(w.leaves);

  count_labels(tree.root, s.label_proportions);
  for (auto& [label, v] : s.label_proportions) v /= s.node_count;
  s.prop_rr = static_cast<double>(count_kind(tree.root, NodeKind::RR)) / s.node_count;
  s.prop_edu = static_cast<double>(count_kind(tree.root, NodeKind::EDU)) / s.node_count;
  s.prop_syntax = static_cast<double>(count_kind(tree.root, NodeKind::SYNTAX)) / s.node_count;
  s.prop_word = static_cast<double>(count_kind(tree.root, NodeKind::WORD)) / s.node_count;

  auto [discourse, syntax] = derive_views(tree);
  s.discourse = shape_of(discourse.root);
  for (const auto& t : syntax.trees) {
    ShapeStats sh = shape_of(t);
    s.syntax_mean.size += sh.size;
    s.syntax_mean.max_width += sh.max_width;
    s.syntax_mean.depth += sh.depth;
    s.syntax_max.size = std::max(s.syntax_max.size, sh.size);
    s.syntax_max.max_width = std::max(s.syntax_max.max_width, sh.max_width);
    s.syntax_max.depth = std::max(s.syntax_max.depth, sh.depth);
  }
  if (!syntax.trees.empty()) {
    const double n = static_cast<double>(syntax.trees.size());
    s.syntax_mean.size /= n;
    s.syntax_mean.max_width /= n;
    s.syntax_mean.depth /= n;
  }
  return s;
}

std::vector<TreeStats> compute_corpus_stats_serial(std::span<const LabeledDocument> docs) {
  std::vector<TreeStats> out(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) out[i] = compute_tree_stats(docs[i].tree);
  return out;
}

std::vector<TreeStats> compute_corpus_stats(std::span<const LabeledDocument> docs) {
  std::vector<TreeStats> out(docs.size());
  const long n = static_cast<long>(docs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (long i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = compute_tree_stats(docs[static_cast<std::size_t>(i)].tree);
  return out;
}

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_continued_fraction(double x, double a, double b) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete_beta: a and b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(x, a, b) / a;
  return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double student_t_cdf(double t, double dof) {
  if (!(dof > 0.0)) throw std::invalid_argument("student_t_cdf: dof must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * incomplete_beta(dof / (dof + t * t), 0.5 * dof, 0.5);
  return t < 0 ? tail : 1.0 - tail;
}

namespace {

std::pair<double, double> mean_var(std::span<const double> v) {
  double mean = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, ss / static_cast<double>(v.size() - 1)};
}

}  // namespace

WelchResult compare_groups(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw StatsError(StatsError::Kind::TooFewSamples, "Welch's t-test needs at least 2 samples per group");
  WelchResult r;
  r.n_a = a.size();
  r.n_b = b.size();
  std::tie(r.mean_a, r.var_a) = mean_var(a);
  std::tie(r.mean_b, r.var_b) = mean_var(b);
  const double sa = r.var_a / static_cast<double>(r.n_a);
  const double sb = r.var_b / static_cast<double>(r.n_b);
  if (sa + sb == 0.0)
    throw StatsError(StatsError::Kind::ZeroVariance, "both groups are constant; t is undefined");
  r.t_statistic = (r.mean_a - r.mean_b) / std::sqrt(sa + sb);
  r.dof = (sa + sb) * (sa + sb) /
          (sa * sa / static_cast<double>(r.n_a - 1) + sb * sb / static_cast<double>(r.n_b - 1));
  r.p_value = incomplete_beta(r.dof / (r.dof + r.t_statistic * r.t_statistic), 0.5 * r.dof, 0.5);
  return r;
}

CorpusReport corpus_report(std::span<const LabeledDocument> docs) {
  CorpusReport report;
  for (const auto& d : docs) (d.y == 1 ? report.n_fake : report.n_true)++;
  if (report.n_fake == 0 || report.n_true == 0)
    throw StatsError(StatsError::Kind::SingleClassCorpus, "corpus report needs both fake and true documents");

  const std::vector<TreeStats> stats = compute_corpus_stats(docs);

  std::vector<std::string> names;
  for (const auto& [name, v] : stats.front().scalars()) names.push_back(name);
  std::vector<std::vector<double>> fake(names.size()), truth(names.size());
  std::set<std::string> labels;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto sc = stats[i].scalars();
    for (std::size_t k = 0; k < sc.size(); ++k) (docs[i].y == 1 ? fake : truth)[k].push_back(sc[k].second);
    for (const auto& [label, v] : stats[i].label_proportions) labels.insert(label);
  }
  for (const auto& label : labels) {
    names.push_back("prop:" + label);
    fake.emplace_back();
    truth.emplace_back();
    for (std::size_t i = 0; i < docs.size(); ++i) {
      const auto& props = stats[i].label_proportions;
      auto it = props.find(label);
      (docs[i].y == 1 ? fake : truth).back().push_back(it == props.end() ? 0.0 : it->second);
    }
  }

  for (std::size_t k = 0; k < names.size(); ++k) {
    ReportRow row;
    row.statistic = names[k];
    row.fake_mean = mean_var(fake[k]).first;
    row.true_mean = mean_var(truth[k]).first;
    try {
      row.test = compare_groups(fake[k], truth[k]);
    } catch (const StatsError& e) {
      row.note = e.kind() == StatsError::Kind::ZeroVariance ? "ZeroVariance" : "TooFewSamples";
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string report_to_csv(const CorpusReport& report) {
  std::string out = "statistic,fake_mean,true_mean,t,dof,p_value\n";
  for (const auto& r : report.rows) {
    out += csv_field(r.statistic) + "," + fmt(r.fake_mean) + "," + fmt(r.true_mean) + ",";
    if (r.test)
      out += fmt(r.test->t_statistic) + "," + fmt(r.test->dof) + "," + fmt(r.test->p_value);
    else
      out += ",,";
    out += "\n";
  }
  return out;
}

std::string report_to_json(const CorpusReport& report) {
  using ordered_json = nlohmann::ordered_json;
  ordered_json j;
  j["n_fake"] = report.n_fake;
  j["n_true"] = report.n_true;
  ordered_json rows = ordered_json::array();
  for (const auto& r : report.rows) {
    ordered_json rj;
    rj["statistic"] = r.statistic;
    rj["fake_mean"] = r.fake_mean;
    rj["true_mean"] = r.true_mean;
    rj["t"] = r.test ? ordered_json(r.test->t_statistic) : ordered_json(nullptr);
    rj["dof"] = r.test ? ordered_json(r.test->dof) : ordered_json(nullptr);
    rj["p_value"] = r.test ? ordered_json(r.test->p_value) : ordered_json(nullptr);
    if (!r.note.empty()) rj["note"] = r.note;
    rows.push_back(std::move(rj));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

}  // namespace hero
