#pragma once

// Tree-shape statistics and fake-vs-true comparisons with Welch's t-test.
//
// Depth counts edges on the longest root-to-leaf path; width counts nodes at
// one depth level.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hero/dataset.hpp"
#include "hero/ling_tree.hpp"

namespace hero {

class StatsError : public std::invalid_argument {
 public:
  enum class Kind { ZeroVariance, TooFewSamples, SingleClassCorpus };
  StatsError(Kind kind, const std::string& what) : std::invalid_argument(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct ShapeStats {
  double size = 0;
  double max_width = 0;
  double depth = 0;
};

ShapeStats shape_of(const TreeNode& root);

// Key under which all word leaves are pooled in label_proportions.
inline const std::string kWordBucket = "<word>";

struct TreeStats {
  double node_count = 0;
  double max_width = 0;
  double depth = 0;
  double mean_width = 0;         // node_count / number of depth levels
  double mean_leaf_depth = 0;    // mean root-to-leaf distance
  double avg_children = 0;       // over internal nodes
  double max_children = 0;
  double leaf_count = 0;
  double prop_rr = 0, prop_edu = 0, prop_syntax = 0, prop_word = 0;
  std::map<std::string, double> label_proportions;

  ShapeStats discourse;
  ShapeStats syntax_mean;  // over the per-EDU syntax trees
  ShapeStats syntax_max;

  // Every scalar field as (name, value) in a fixed order.
  std::vector<std::pair<std::string, double>> scalars() const;
};

TreeStats compute_tree_stats(const LingTree& tree);

std::vector<TreeStats> compute_corpus_stats(std::span<const LabeledDocument> docs);
std::vector<TreeStats> compute_corpus_stats_serial(std::span<const LabeledDocument> docs);

struct WelchResult {
  double t_statistic = 0;
  double dof = 0;
  double p_value = 1;  // two-sided
  double mean_a = 0, mean_b = 0;
  double var_a = 0, var_b = 0;  // unbiased sample variances
  std::size_t n_a = 0, n_b = 0;
};

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double x, double a, double b);
// P(T <= t) for Student's t with `dof` degrees of freedom (real-valued dof allowed).
double student_t_cdf(double t, double dof);

WelchResult compare_groups(std::span<const double> a, std::span<const double> b);

struct ReportRow {
  std::string statistic;
  double fake_mean = 0, true_mean = 0;
  std::optional<WelchResult> test;  // absent for degenerate rows
  std::string note;                 // why the test is absent
};

struct CorpusReport {
  std::size_t n_fake = 0, n_true = 0;
  std::vector<ReportRow> rows;
};

CorpusReport corpus_report(std::span<const LabeledDocument> docs);
std::string report_to_csv(const CorpusReport& report);
std::string report_to_json(const CorpusReport& report);

}  // namespace hero
