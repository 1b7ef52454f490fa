#pragma once

// Binary classification metrics with "fake" (label 1) as the positive class.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>

namespace hero {

class EvalError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Confusion {
  long tp = 0;  // fake predicted fake
  long fp = 0;  // true predicted fake
  long tn = 0;
  long fn = 0;

  long total() const { return tp + fp + tn + fn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct MetricsReport {
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  std::optional<double> auc;  // absent when the set holds one class only
  Confusion confusion;
};

inline constexpr double kDecisionThreshold = 0.5;

// F1 of each class from the confusion counts; 0 when the class never occurs
// in truth or prediction.
double f1_fake(const Confusion& c);
double f1_true(const Confusion& c);

Confusion confusion_at(std::span<const int> truth, std::span<const double> scores,
                       double threshold = kDecisionThreshold);
// Rank-sum (Mann-Whitney) AUC with average ranks for ties.
std::optional<double> roc_auc(std::span<const int> truth, std::span<const double> scores);
MetricsReport metrics_from(const Confusion& c, std::optional<double> auc);
MetricsReport compute_metrics(std::span<const int> truth, std::span<const double> scores,
                              double threshold = kDecisionThreshold);

}  // namespace hero
