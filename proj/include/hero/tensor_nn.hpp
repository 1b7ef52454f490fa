#pragma once

// Numeric kernel: GRU cell forward/backward, two-logit softmax with
// cross-entropy, Adam, and a central-difference gradient checker.
// Everything is double precision.

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hero/rng.hpp"

namespace hero {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class ShapeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input dimension d, hidden dimension d/2.
struct GruParams {
  Mat W_r, W_z, W_h;  // (d/2) x d
  Mat U_r, U_z, U_h;  // (d/2) x (d/2)

  static GruParams zeros(int d);
  // Uniform in [-1/sqrt(fanin), 1/sqrt(fanin)].
  static GruParams random(int d, Rng& rng);

  int input_dim() const { return static_cast<int>(W_r.cols()); }
  int hidden_dim() const { return static_cast<int>(W_r.rows()); }
  std::size_t size() const;

  // W_r, W_z, W_h, U_r, U_z, U_h; the order is part of the flat layout.
  template <class F>
  void for_each(F&& f) {
    f("W_r", W_r), f("W_z", W_z), f("W_h", W_h), f("U_r", U_r), f("U_z", U_z), f("U_h", U_h);
  }
  template <class F>
  void for_each(F&& f) const {
    f("W_r", W_r), f("W_z", W_z), f("W_h", W_h), f("U_r", U_r), f("U_z", U_z), f("U_h", U_h);
  }

  GruParams& operator+=(const GruParams& o);
  friend bool operator==(const GruParams& a, const GruParams& b);
};

struct GruTrace {
  std::vector<Vec> x, r, z, h_hat, h;  // h[i] is the state after step i; h_0 = 0 is implicit

  std::size_t size() const { return x.size(); }
};

struct GruBackward {
  GruParams grads;
  std::vector<Vec> grad_x;
};

GruTrace gru_forward(const GruParams& params, std::span<const Vec> inputs);
// grad_h[i] is dLoss/dh[i] from outside the recurrence.
GruBackward gru_backward(const GruParams& params, const GruTrace& trace, std::span<const Vec> grad_h);

struct ClassifierParams {
  Mat W;  // 2 x d
  Vec b;  // 2

  static ClassifierParams zeros(int d);
  static ClassifierParams random(int d, Rng& rng);
  std::size_t size() const { return static_cast<std::size_t>(W.size() + b.size()); }

  ClassifierParams& operator+=(const ClassifierParams& o);
  friend bool operator==(const ClassifierParams& a, const ClassifierParams& b);
};

inline constexpr double kProbClamp = 1e-12;

struct SoftmaxResult {
  double p_fake;
  double loss;
};

// Class 1 is fake.
double softmax_fake(const ClassifierParams& params, const Vec& h);
SoftmaxResult softmax_ce(const ClassifierParams& params, const Vec& h, int y);

struct ClassifierBackward {
  ClassifierParams grads;
  Vec grad_h;
};

ClassifierBackward softmax_ce_backward(const ClassifierParams& params, const Vec& h, int y);

struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long t = 0;
  std::vector<double> m, v;

  AdamState() = default;
  AdamState(std::size_t n, double lr_) : lr(lr_), m(n, 0.0), v(n, 0.0) {}
};

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads);

using ScalarFn = std::function<double(std::span<const double>)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  std::vector<double> numeric;
};

double relative_error(double analytic, double numeric);

// Central differences over every coordinate. The OpenMP version splits the
// coordinates across threads; f must be safe to call concurrently.
GradCheckResult finite_diff_check(const ScalarFn& f, std::span<const double> params,
                                  std::span<const double> analytic, double step = 1e-5);
GradCheckResult finite_diff_check_serial(const ScalarFn& f, std::span<const double> params,
                                         std::span<const double> analytic, double step = 1e-5);

}  // namespace hero
