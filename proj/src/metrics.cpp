#include "hero/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace hero {

namespace {

double f1(long tp, long fp, long fn) {
  const long denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

void check(std::span<const int> truth, std::span<const double> scores) {
  if (truth.empty()) throw EvalError("EmptyEvalSet: no documents to evaluate");
  if (truth.size() != scores.size()) throw EvalError("truth and score counts differ");
}

}  // namespace

double f1_fake(const Confusion& c) { return f1(c.tp, c.fp, c.fn); }
double f1_true(const Confusion& c) { return f1(c.tn, c.fn, c.fp); }

Confusion confusion_at(std::span<const int> truth, std::span<const double> scores, double threshold) {
  check(truth, scores);
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool fake = scores[i] >= threshold;
    if (truth[i] == 1)
      fake ? ++c.tp : ++c.fn;
    else
      fake ? ++c.fp : ++c.tn;
  }
  return c;
}

std::optional<double> roc_auc(std::span<const int> truth, std::span<const double> scores) {
  check(truth, scores);
  const std::size_t n = truth.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos_rank_sum = 0.0;
  long pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // Ranks i+1..j share their average.
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (truth[order[k]] == 1) {
        pos_rank_sum += rank;
        ++pos;
      }
    i = j;
  }
  const long neg = static_cast<long>(n) - pos;
  if (pos == 0 || neg == 0) return std::nullopt;
  const double u = pos_rank_sum - 0.5 * static_cast<double>(pos) * static_cast<double>(pos + 1);
  return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

MetricsReport metrics_from(const Confusion& c, std::optional<double> auc) {
  MetricsReport r;
  r.confusion = c;
  r.macro_f1 = 0.5 * (f1_fake(c) + f1_true(c));
  // Pooled over both classes every error is one FP and one FN, so this is accuracy.
  const long correct = c.tp + c.tn;
  const long wrong = c.fp + c.fn;
  r.micro_f1 = f1(correct, wrong, wrong);
  r.auc = auc;
  return r;
}

MetricsReport compute_metrics(std::span<const int> truth, std::span<const double> scores, double threshold) {
  return metrics_from(confusion_at(truth, scores, threshold), roc_auc(truth, scores));
}

}  // namespace hero
