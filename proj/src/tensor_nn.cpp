#include "hero/tensor_nn.hpp"

#include <algorithm>
#include <cmath>

namespace hero {

namespace {

Mat uniform_matrix(int rows, int cols, double bound, Rng& rng) {
  Mat m(rows, cols);
  // Row-major fill so the draw order does not depend on Eigen's storage order.
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-bound, bound);
  return m;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_input(const GruParams& p, const Vec& x) {
  if (x.size() != p.input_dim())
    throw ShapeMismatch("GRU input has " + std::to_string(x.size()) + " values, expected " +
                        std::to_string(p.input_dim()));
}

}  // namespace

GruParams GruParams::zeros(int d) {
  if (d <= 0 || d % 2 != 0) throw ShapeMismatch("GRU input dimension must be positive and even");
  int k = d / 2;
  return {Mat::Zero(k, d), Mat::Zero(k, d), Mat::Zero(k, d),
          Mat::Zero(k, k), Mat::Zero(k, k), Mat::Zero(k, k)};
}

GruParams GruParams::random(int d, Rng& rng) {
  if (d <= 0 || d % 2 != 0) throw ShapeMismatch("GRU input dimension must be positive and even");
  int k = d / 2;
  double bw = 1.0 / std::sqrt(static_cast<double>(d));
  double bu = 1.0 / std::sqrt(static_cast<double>(k));
  GruParams p;
  p.W_r = uniform_matrix(k, d, bw, rng);
  p.W_z = uniform_matrix(k, d, bw, rng);
  p.W_h = uniform_matrix(k, d, bw, rng);
  p.U_r = uniform_matrix(k, k, bu, rng);
  p.U_z = uniform_matrix(k, k, bu, rng);
  p.U_h = uniform_matrix(k, k, bu, rng);
  return p;
}

std::size_t GruParams::size() const {
  std::size_t n = 0;
  for_each([&](const char*, const Mat& m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

GruParams& GruParams::operator+=(const GruParams& o) {
  W_r += o.W_r, W_z += o.W_z, W_h += o.W_h;
  U_r += o.U_r, U_z += o.U_z, U_h += o.U_h;
  return *this;
}

bool operator==(const GruParams& a, const GruParams& b) {
  return a.W_r == b.W_r && a.W_z == b.W_z && a.W_h == b.W_h && a.U_r == b.U_r && a.U_z == b.U_z &&
         a.U_h == b.U_h;
}

GruTrace gru_forward(const GruParams& p, std::span<const Vec> inputs) {
  if (inputs.empty()) throw ShapeMismatch("GRU needs at least one input step");
  const int k = p.hidden_dim();
  GruTrace t;
  t.x.reserve(inputs.size());
  t.r.reserve(inputs.size());
  t.z.reserve(inputs.size());
  t.h_hat.reserve(inputs.size());
  t.h.reserve(inputs.size());

  Vec h_prev = Vec::Zero(k);
  for (const Vec& x : inputs) {
    check_input(p, x);
    Vec r = (p.W_r * x + p.U_r * h_prev).unaryExpr(&sigmoid);
    Vec z = (p.W_z * x + p.U_z * h_prev).unaryExpr(&sigmoid);
    Vec gated = h_prev.cwiseProduct(r);
    Vec h_hat = (p.W_h * x + p.U_h * gated).array().tanh().matrix();
    Vec h = (Vec::Ones(k) - z).cwiseProduct(h_prev) + z.cwiseProduct(h_hat);
    t.x.push_back(x);
    t.r.push_back(std::move(r));
    t.z.push_back(std::move(z));
    t.h_hat.push_back(std::move(h_hat));
    t.h.push_back(h);
    h_prev = std::move(h);
  }
  return t;
}

GruBackward gru_backward(const GruParams& p, const GruTrace& t, std::span<const Vec> grad_h) {
  const std::size_t n = t.size();
  if (grad_h.size() != n)
    throw ShapeMismatch("gru_backward: " + std::to_string(grad_h.size()) + " upstream gradients for " +
                        std::to_string(n) + " steps");
  const int d = p.input_dim();
  const int k = p.hidden_dim();

  GruBackward out{GruParams::zeros(d), std::vector<Vec>(n)};
  GruParams& g = out.grads;
  Vec carry = Vec::Zero(k);  // dLoss/dh_i arriving from step i+1

  for (std::size_t s = n; s-- > 0;) {
    if (grad_h[s].size() != k) throw ShapeMismatch("gru_backward: upstream gradient has wrong size");
    const Vec& x = t.x[s];
    const Vec& r = t.r[s];
    const Vec& z = t.z[s];
    const Vec& h_hat = t.h_hat[s];
    Vec h_prev = s == 0 ? Vec::Zero(k) : t.h[s - 1];

    Vec dh = grad_h[s] + carry;
    Vec dz = dh.cwiseProduct(h_hat - h_prev);
    Vec dh_hat = dh.cwiseProduct(z);
    Vec dh_prev = dh.cwiseProduct(Vec::Ones(k) - z);

    Vec da_h = dh_hat.cwiseProduct((Vec::Ones(k) - h_hat.cwiseProduct(h_hat)));
    Vec gated = h_prev.cwiseProduct(r);
    g.W_h.noalias() += da_h * x.transpose();
    g.U_h.noalias() += da_h * gated.transpose();
    Vec d_gated = p.U_h.transpose() * da_h;
    dh_prev += d_gated.cwiseProduct(r);
    Vec dr = d_gated.cwiseProduct(h_prev);

    Vec da_z = dz.cwiseProduct(z.cwiseProduct(Vec::Ones(k) - z));
    Vec da_r = dr.cwiseProduct(r.cwiseProduct(Vec::Ones(k) - r));
    g.W_z.noalias() += da_z * x.transpose();
    g.U_z.noalias() += da_z * h_prev.transpose();
    g.W_r.noalias() += da_r * x.transpose();
    g.U_r.noalias() += da_r * h_prev.transpose();
    dh_prev.noalias() += p.U_z.transpose() * da_z;
    dh_prev.noalias() += p.U_r.transpose() * da_r;

    out.grad_x[s] = p.W_h.transpose() * da_h + p.W_z.transpose() * da_z + p.W_r.transpose() * da_r;
    carry = std::move(dh_prev);
  }
  return out;
}

ClassifierParams ClassifierParams::zeros(int d) { return {Mat::Zero(2, d), Vec::Zero(2)}; }

ClassifierParams ClassifierParams::random(int d, Rng& rng) {
  double bound = 1.0 / std::sqrt(static_cast<double>(d));
  return {uniform_matrix(2, d, bound, rng), Vec::Zero(2)};
}

ClassifierParams& ClassifierParams::operator+=(const ClassifierParams& o) {
  W += o.W;
  b += o.b;
  return *this;
}

bool operator==(const ClassifierParams& a, const ClassifierParams& b) { return a.W == b.W && a.b == b.b; }

namespace {

// Softmax over two logits with max subtraction; returns both probabilities.
std::pair<double, double> softmax2(const ClassifierParams& params, const Vec& h) {
  if (h.size() != params.W.cols())
    throw ShapeMismatch("classifier input has " + std::to_string(h.size()) + " values, expected " +
                        std::to_string(params.W.cols()));
  Vec logits = params.W * h + params.b;
  double m = std::max(logits[0], logits[1]);
  double e0 = std::exp(logits[0] - m);
  double e1 = std::exp(logits[1] - m);
  double s = e0 + e1;
  return {e0 / s, e1 / s};
}

}  // namespace

double softmax_fake(const ClassifierParams& params, const Vec& h) { return softmax2(params, h).second; }

SoftmaxResult softmax_ce(const ClassifierParams& params, const Vec& h, int y) {
  double p = softmax_fake(params, h);
  double pc = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
  double loss = y == 1 ? -std::log(pc) : -std::log(1.0 - pc);
  return {p, loss};
}

ClassifierBackward softmax_ce_backward(const ClassifierParams& params, const Vec& h, int y) {
  auto [p0, p1] = softmax2(params, h);
  Vec dlogits(2);
  dlogits << p0 - (y == 0 ? 1.0 : 0.0), p1 - (y == 1 ? 1.0 : 0.0);
  ClassifierBackward out;
  out.grads.W = dlogits * h.transpose();
  out.grads.b = dlogits;
  out.grad_h = params.W.transpose() * dlogits;
  return out;
}

void adam_step(AdamState& s, std::span<double> params, std::span<const double> grads) {
  if (params.size() != grads.size() || s.m.size() != params.size() || s.v.size() != params.size())
    throw ShapeMismatch("adam_step: parameter, gradient and moment sizes differ");
  ++s.t;
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.t));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    s.m[i] = s.beta1 * s.m[i] + (1.0 - s.beta1) * g;
    s.v[i] = s.beta2 * s.v[i] + (1.0 - s.beta2) * g * g;
    const double m_hat = s.m[i] / c1;
    const double v_hat = s.v[i] / c2;
    params[i] -= s.lr * m_hat / (std::sqrt(v_hat) + s.eps);
  }
}

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
}

namespace {

void check_sizes(std::span<const double> params, std::span<const double> analytic) {
  if (params.size() != analytic.size())
    throw ShapeMismatch("finite_diff_check: parameter and gradient sizes differ");
}

double central_difference(const ScalarFn& f, std::vector<double>& theta, std::size_t i, double step) {
  const double saved = theta[i];
  theta[i] = saved + step;
  const double up = f(theta);
  theta[i] = saved - step;
  const double down = f(theta);
  theta[i] = saved;
  return (up - down) / (2.0 * step);
}

GradCheckResult summarize(std::vector<double> numeric, std::span<const double> analytic) {
  GradCheckResult out;
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    double e = relative_error(analytic[i], numeric[i]);
    if (e > out.max_rel_error) {
      out.max_rel_error = e;
      out.worst_index = i;
    }
  }
  out.numeric = std::move(numeric);
  return out;
}

}  // namespace

GradCheckResult finite_diff_check_serial(const ScalarFn& f, std::span<const double> params,
                                         std::span<const double> analytic, double step) {
  check_sizes(params, analytic);
  std::vector<double> theta(params.begin(), params.end());
  std::vector<double> numeric(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) numeric[i] = central_difference(f, theta, i, step);
  return summarize(std::move(numeric), analytic);
}

GradCheckResult finite_diff_check(const ScalarFn& f, std::span<const double> params,
                                  std::span<const double> analytic, double step) {
  check_sizes(params, analytic);
  std::vector<double> numeric(params.size());
  const long n = static_cast<long>(params.size());
#pragma omp parallel
  {
    std::vector<double> theta(params.begin(), params.end());
#pragma omp for schedule(static)
    for (long i = 0; i < n; ++i)
      numeric[static_cast<std::size_t>(i)] = central_difference(f, theta, static_cast<std::size_t>(i), step);
  }
  return summarize(std::move(numeric), analytic);
}

}  // namespace hero
