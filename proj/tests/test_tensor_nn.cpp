#include <doctest.h>

#include <cmath>
#include <vector>

#include "hero/tensor_nn.hpp"
#include "oracles.hpp"

using namespace hero;

namespace {

std::vector<Vec> random_inputs(Rng& rng, int n, int d) {
  std::vector<Vec> xs;
  for (int i = 0; i < n; ++i) {
    Vec x(d);
    for (int j = 0; j < d; ++j) x[j] = rng.uniform(-1, 1);
    xs.push_back(x);
  }
  return xs;
}

std::vector<double> flat(const GruParams& p) {
  std::vector<double> out;
  p.for_each([&](const char*, const Mat& m) {
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  });
  return out;
}

void unflat(GruParams& p, const std::vector<double>& v) {
  std::size_t k = 0;
  p.for_each([&](const char*, Mat& m) {
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) m(i, j) = v[k++];
  });
}

// L = sum_i c_i . h_i
double weighted_states(const GruParams& p, const std::vector<Vec>& xs, const std::vector<Vec>& c) {
  GruTrace t = gru_forward(p, xs);
  double s = 0;
  for (std::size_t i = 0; i < t.size(); ++i) s += c[i].dot(t.h[i]);
  return s;
}

void check_gru_backward(int d, std::uint64_t seed) {
  Rng rng(seed);
  GruParams p = GruParams::random(d, rng);
  auto xs = random_inputs(rng, 4, d);
  auto c = random_inputs(rng, 4, d / 2);
  GruTrace t = gru_forward(p, xs);
  GruBackward g = gru_backward(p, t, c);

  const double h = 1e-5;
  std::vector<double> theta = flat(p), analytic = flat(g.grads);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    GruParams q = p;
    auto plus = theta, minus = theta;
    plus[i] += h;
    minus[i] -= h;
    unflat(q, plus);
    const double fp = weighted_states(q, xs, c);
    unflat(q, minus);
    const double fm = weighted_states(q, xs, c);
    const double numeric = (fp - fm) / (2 * h);
    CHECK(std::fabs(numeric - analytic[i]) <= 1e-8 * std::max(1.0, std::fabs(numeric)));
  }
  for (std::size_t s = 0; s < xs.size(); ++s)
    for (int j = 0; j < d; ++j) {
      auto plus = xs, minus = xs;
      plus[s][j] += h;
      minus[s][j] -= h;
      const double numeric = (weighted_states(p, plus, c) - weighted_states(p, minus, c)) / (2 * h);
      CHECK(std::fabs(numeric - g.grad_x[s][j]) <= 1e-8 * std::max(1.0, std::fabs(numeric)));
    }
}

}  // namespace

TEST_CASE("parameter shapes") {
  Rng rng(1);
  GruParams p = GruParams::random(8, rng);
  CHECK(p.W_r.rows() == 4);
  CHECK(p.W_r.cols() == 8);
  CHECK(p.U_h.rows() == 4);
  CHECK(p.U_h.cols() == 4);
  CHECK(p.size() == 3 * (4 * 8 + 4 * 4));
  CHECK(p.W_r.cwiseAbs().maxCoeff() <= 1 / std::sqrt(8.0));
  CHECK(p.U_r.cwiseAbs().maxCoeff() <= 1 / std::sqrt(4.0));
  ClassifierParams c = ClassifierParams::random(8, rng);
  CHECK(c.size() == 18);
  CHECK(c.b.isZero());
}

TEST_CASE("zero parameters keep the state at zero") {
  GruParams p = GruParams::zeros(4);
  Rng rng(2);
  auto xs = random_inputs(rng, 3, 4);
  GruTrace t = gru_forward(p, xs);
  REQUIRE(t.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(t.h[i].isZero());
    CHECK(t.r[i].isApprox(Vec::Constant(2, 0.5)));
    CHECK(t.z[i].isApprox(Vec::Constant(2, 0.5)));
  }
}

TEST_CASE("forward matches a scalar-loop GRU") {
  Rng rng(5);
  for (int d : {2, 6, 10}) {
    GruParams p = GruParams::random(d, rng);
    auto xs = random_inputs(rng, 5, d);
    GruTrace t = gru_forward(p, xs);
    std::vector<oracle::V> vs;
    for (const auto& x : xs) vs.push_back(oracle::to_v(x));
    auto states = oracle::gru_states(p, vs);
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (int j = 0; j < d / 2; ++j) CHECK(std::fabs(t.h[i][j] - states[i][j]) < 1e-12);
  }
}

TEST_CASE("forward rejects wrong input sizes") {
  Rng rng(1);
  GruParams p = GruParams::random(4, rng);
  std::vector<Vec> xs{Vec::Zero(3)};
  CHECK_THROWS_AS(gru_forward(p, xs), ShapeMismatch);
}

TEST_CASE("backward matches central differences") {
  check_gru_backward(2, 11);
  check_gru_backward(8, 12);
}

TEST_CASE("softmax and cross-entropy") {
  ClassifierParams c = ClassifierParams::zeros(2);
  c.W(1, 0) = 1.0;
  Vec h(2);
  h << 1.0, 0.0;
  // logits (0, 1)
  SoftmaxResult r = softmax_ce(c, h, 1);
  CHECK(r.p_fake == doctest::Approx(0.731059).epsilon(1e-6));
  CHECK(r.loss == doctest::Approx(0.313262).epsilon(1e-6));
  CHECK(softmax_ce(c, h, 0).loss == doctest::Approx(1.313262).epsilon(1e-6));

  ClassifierParams big = ClassifierParams::zeros(2);
  big.b << 0, 1000;
  CHECK(std::isfinite(softmax_ce(big, Vec::Zero(2), 0).loss));
  CHECK(softmax_ce(big, Vec::Zero(2), 0).loss == doctest::Approx(-std::log(1e-12)));
}

TEST_CASE("softmax backward matches central differences") {
  Rng rng(4);
  ClassifierParams c = ClassifierParams::random(6, rng);
  c.b << 0.3, -0.2;
  Vec h(6);
  for (int i = 0; i < 6; ++i) h[i] = rng.uniform(-1, 1);
  for (int y : {0, 1}) {
    ClassifierBackward g = softmax_ce_backward(c, h, y);
    const double eps = 1e-6;
    for (int i = 0; i < 6; ++i) {
      Vec hp = h, hm = h;
      hp[i] += eps;
      hm[i] -= eps;
      const double n = (softmax_ce(c, hp, y).loss - softmax_ce(c, hm, y).loss) / (2 * eps);
      CHECK(g.grad_h[i] == doctest::Approx(n).epsilon(1e-7));
    }
    for (int k = 0; k < 2; ++k) {
      ClassifierParams cp = c, cm = c;
      cp.b[k] += eps;
      cm.b[k] -= eps;
      const double n = (softmax_ce(cp, h, y).loss - softmax_ce(cm, h, y).loss) / (2 * eps);
      CHECK(g.grads.b[k] == doctest::Approx(n).epsilon(1e-7));
      CHECK(g.grads.W(k, 2) == doctest::Approx(g.grads.b[k] * h[2]));
    }
  }
}

TEST_CASE("first Adam step moves each weight by about lr against the gradient sign") {
  std::vector<double> w{1.0, -2.0, 0.5};
  std::vector<double> g{0.3, -4.0, 1e-3};
  AdamState s(3, 0.01);
  adam_step(s, w, g);
  CHECK(w[0] == doctest::Approx(1.0 - 0.01).epsilon(1e-6));
  CHECK(w[1] == doctest::Approx(-2.0 + 0.01).epsilon(1e-6));
  CHECK(w[2] == doctest::Approx(0.5 - 0.01).epsilon(1e-4));
  CHECK(s.t == 1);
}

TEST_CASE("Adam on w^2 matches a scalar implementation") {
  std::vector<double> w{1.5};
  AdamState s(1, 0.1);
  double x = 1.5, m = 0, v = 0;
  for (int t = 1; t <= 3; ++t) {
    std::vector<double> g{2 * w[0]};
    adam_step(s, w, g);
    const double gx = 2 * x;
    m = 0.9 * m + 0.1 * gx;
    v = 0.999 * v + 0.001 * gx * gx;
    const double mh = m / (1 - std::pow(0.9, t)), vh = v / (1 - std::pow(0.999, t));
    x -= 0.1 * mh / (std::sqrt(vh) + 1e-8);
    CHECK(w[0] == doctest::Approx(x).epsilon(1e-14));
  }
  CHECK(w[0] < 1.5);
}

TEST_CASE("Adam checks sizes") {
  std::vector<double> w{1.0, 2.0};
  std::vector<double> g{1.0};
  AdamState s(2, 0.1);
  CHECK_THROWS_AS(adam_step(s, w, g), ShapeMismatch);
}

TEST_CASE("finite-difference checker") {
  ScalarFn square = [](std::span<const double> t) { return t[0] * t[0] + 3 * t[1] * t[1]; };
  std::vector<double> theta{0.7, -1.2};
  std::vector<double> good{1.4, -7.2};
  GradCheckResult r = finite_diff_check(square, theta, good);
  CHECK(r.max_rel_error < 1e-8);
  CHECK(r.numeric[1] == doctest::Approx(-7.2));

  std::vector<double> bad{1.4, -7.0};
  GradCheckResult rb = finite_diff_check_serial(square, theta, bad);
  CHECK(rb.worst_index == 1);
  CHECK(rb.max_rel_error > 1e-3);

  ScalarFn sine = [](std::span<const double> t) { return std::sin(t[0]); };
  std::vector<double> x{0.4}, cosx{std::cos(0.4)};
  CHECK(finite_diff_check(sine, x, cosx).max_rel_error < 1e-9);

  CHECK(relative_error(0.0, 0.0) == 0.0);
  CHECK(relative_error(1.0, 3.0) == doctest::Approx(0.5));
}
