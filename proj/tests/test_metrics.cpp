#include <doctest.h>

#include <cmath>
#include <vector>

#include "hero/metrics.hpp"
#include "hero/rng.hpp"
#include "oracles.hpp"

using namespace hero;

TEST_CASE("AUC of the four-pair example") {
  std::vector<int> y{1, 1, 0, 0};
  std::vector<double> s{0.9, 0.4, 0.6, 0.1};
  CHECK(*roc_auc(y, s) == doctest::Approx(0.75));
}

TEST_CASE("F1 from a confusion matrix") {
  std::vector<int> y{1, 1, 0, 0};
  std::vector<double> s{0.9, 0.2, 0.3, 0.1};
  MetricsReport m = compute_metrics(y, s);
  CHECK(m.confusion == Confusion{1, 0, 2, 1});
  CHECK(f1_fake(m.confusion) == doctest::Approx(2.0 / 3));
  CHECK(f1_true(m.confusion) == doctest::Approx(4.0 / 5));
  CHECK(m.macro_f1 == doctest::Approx(11.0 / 15));
  CHECK(m.micro_f1 == doctest::Approx(0.75));
}

TEST_CASE("threshold is inclusive") {
  std::vector<int> y{1, 0};
  std::vector<double> s{0.5, 0.4999};
  CHECK(confusion_at(y, s) == Confusion{1, 0, 1, 0});
}

TEST_CASE("degenerate sets") {
  std::vector<int> y{1, 1};
  std::vector<double> s{0.2, 0.7};
  MetricsReport m = compute_metrics(y, s);
  CHECK_FALSE(m.auc.has_value());
  CHECK(f1_true(m.confusion) == 0.0);
  CHECK_THROWS_AS(compute_metrics(std::vector<int>{}, std::vector<double>{}), EvalError);
  CHECK_THROWS_AS(compute_metrics(y, std::vector<double>{0.1}), EvalError);
}

TEST_CASE("ties get half credit") {
  std::vector<int> y{1, 0, 1, 0};
  std::vector<double> s{0.5, 0.5, 0.5, 0.5};
  CHECK(*roc_auc(y, s) == 0.5);
}

TEST_CASE("random sets agree with the pairwise reference") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(60));
    std::vector<int> y(n);
    std::vector<double> s(n);
    for (int i = 0; i < n; ++i) {
      y[i] = static_cast<int>(rng.below(2));
      // coarse scores so ties happen
      s[i] = static_cast<double>(rng.below(11)) / 10.0;
    }
    y[0] = 1;
    y[1] = 0;
    MetricsReport m = compute_metrics(y, s);
    CHECK(std::fabs(*m.auc - oracle::auc(y, s)) < 1e-12);
    CHECK(std::fabs(m.macro_f1 - oracle::macro_f1(y, s)) < 1e-12);
    CHECK(std::fabs(m.micro_f1 - oracle::micro_f1(y, s)) < 1e-12);
    const double acc = static_cast<double>(m.confusion.tp + m.confusion.tn) / n;
    CHECK(std::fabs(m.micro_f1 - acc) < 1e-12);

    std::vector<double> cubed(s);
    for (double& v : cubed) v = v * v * v + 2;
    CHECK(*roc_auc(y, cubed) == *m.auc);
  }
}
