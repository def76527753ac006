#include "fracdyn/frac_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fracdyn/errors.hpp"

namespace fracdyn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> reversed(std::span<const double> v) { return {v.rbegin(), v.rend()}; }

void check_eps(double eps, const char* op) {
  if (!(eps > 0.0 && eps <= 1.0))
    throw DomainError(std::string(op) + ": eps must lie in (0,1], got " + std::to_string(eps));
}

}  // namespace

SampleSeries fractional_integral(const SampleSeries& f, double eps, kernels::Exec exec) {
  check_eps(eps, "fractional_integral");
  std::vector<double> out(f.size());
  kernels::fractional_integral(f.values(), eps, f.grid().step(), out, exec);
  return {f.grid(), std::move(out)};
}

SampleSeries fractional_integral_right(const SampleSeries& f, double eps, kernels::Exec exec) {
  check_eps(eps, "fractional_integral_right");
  const auto rev = reversed(f.values());
  std::vector<double> out(f.size());
  kernels::fractional_integral(rev, eps, f.grid().step(), out, exec);
  std::reverse(out.begin(), out.end());
  return {f.grid(), std::move(out)};
}

SampleSeries caputo_left(const SampleSeries& f_m, const FracOrder& order, kernels::Exec exec) {
  order.require_fractional("caputo_left");
  return fractional_integral(f_m, order.epsilon(), exec);
}

SampleSeries caputo_right(const SampleSeries& f_m, const FracOrder& order, kernels::Exec exec) {
  order.require_fractional("caputo_right");
  const auto j = fractional_integral_right(f_m, order.epsilon(), exec);
  if (order.m() % 2 == 0) return j;
  std::vector<double> v(j.values().begin(), j.values().end());
  for (double& x : v) x = -x;
  return {f_m.grid(), std::move(v)};
}

SampleSeries differentiate(const SampleSeries& f, int times) {
  if (f.size() < 3) throw DomainError("differentiate: need at least 3 samples");
  std::vector<double> cur(f.values().begin(), f.values().end());
  const double h = f.grid().step();
  const std::size_t n = cur.size();
  for (int pass = 0; pass < times; ++pass) {
    std::vector<double> d(n);
    d[0] = (-3.0 * cur[0] + 4.0 * cur[1] - cur[2]) / (2.0 * h);
    for (std::size_t j = 1; j + 1 < n; ++j) d[j] = (cur[j + 1] - cur[j - 1]) / (2.0 * h);
    d[n - 1] = (3.0 * cur[n - 1] - 4.0 * cur[n - 2] + cur[n - 3]) / (2.0 * h);
    cur = std::move(d);
  }
  return {f.grid(), std::move(cur)};
}

SampleSeries caputo_left_from_samples(const SampleSeries& f, const FracOrder& order) {
  order.require_fractional("caputo_left_from_samples");
  return caputo_left(differentiate(f, order.m()), order);
}

SampleSeries riemann_liouville_left(const SampleSeries& f, const FracOrder& order,
                                    kernels::Exec exec) {
  order.require_fractional("riemann_liouville_left");
  const auto j = fractional_integral(f, order.epsilon(), exec);
  const auto d = differentiate(j, order.m());
  std::vector<double> v(d.values().begin(), d.values().end());
  v[0] = kNaN;
  return {f.grid(), std::move(v)};
}

SampleSeries riemann_liouville_right(const SampleSeries& f, const FracOrder& order,
                                     kernels::Exec exec) {
  order.require_fractional("riemann_liouville_right");
  const auto j = fractional_integral_right(f, order.epsilon(), exec);
  const auto d = differentiate(j, order.m());
  const double sign = order.m() % 2 == 0 ? 1.0 : -1.0;
  std::vector<double> v(d.values().begin(), d.values().end());
  for (double& x : v) x *= sign;
  v.back() = kNaN;
  return {f.grid(), std::move(v)};
}

CaputoHistory::CaputoHistory(const FracOrder& order, double h,
                             std::optional<std::size_t> memory_window)
    : order_(order),
      h_(h),
      beta_(0.0),
      scale_(0.0),
      window_(memory_window),
      weights_(0.5, 0) {
  order.require_fractional("caputo_left_history");
  if (order.alpha() >= 2.0)
    throw UnsupportedOrderError("caputo_left_history: order " + std::to_string(order.alpha()) +
                                " >= 2 is not supported; augment the state instead");
  if (!(h > 0.0)) throw DomainError("caputo_left_history: step must be positive");
  if (window_ && *window_ < 10) throw DomainError("memory window must be at least 10 steps");
  beta_ = order.alpha() < 1.0 ? order.alpha() : order.alpha() - 1.0;
  scale_ = std::pow(h, -beta_) / std::tgamma(2.0 - beta_);
  weights_ = kernels::L1Weights(beta_, 0);
}

double CaputoHistory::evaluate(std::span<const double> x, std::size_t j,
                               std::optional<double> initial_slope) {
  if (j >= x.size()) throw DomainError("caputo_left_history: index beyond history");
  if (j == 0) return 0.0;
  weights_.reserve(j);
  increments_.resize(j);
  const std::size_t k0 = window_ && j > *window_ ? j - *window_ : 0;
  if (order_.alpha() < 1.0) {
    for (std::size_t k = k0; k < j; ++k) increments_[k] = x[k + 1] - x[k];
  } else {
    double v0;
    if (initial_slope) {
      v0 = *initial_slope;
    } else if (j == 1) {
      v0 = (x[1] - x[0]) / h_;
    } else {
      v0 = (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * h_);
    }
    // velocity increment over [t_k, t_{k+1}], i.e. h * x''
    if (k0 == 0) increments_[0] = 2.0 * (x[1] - x[0] - h_ * v0) / h_;
    for (std::size_t k = std::max<std::size_t>(k0, 1); k < j; ++k)
      increments_[k] = (x[k + 1] - 2.0 * x[k] + x[k - 1]) / h_;
  }
  double acc = 0.0;
  for (std::size_t k = k0; k < j; ++k) acc += weights_[j - 1 - k] * increments_[k];
  return scale_ * acc;
}

double CaputoHistory::newest_weight(std::size_t j) const {
  if (j == 0) return 0.0;
  if (order_.alpha() < 1.0) return scale_;
  return (j == 1 ? 2.0 : 1.0) * scale_ / h_;
}

double caputo_left_history(const SampleSeries& q_history, const FracOrder& order,
                           std::optional<double> initial_slope) {
  if (q_history.size() < 2) throw DomainError("caputo_left_history: need at least 2 samples");
  CaputoHistory hist(order, q_history.grid().step());
  return hist.evaluate(q_history.values(), q_history.size() - 1, initial_slope);
}

double CommutationDefect::mismatch(double t_from) const {
  const double a = analytic.grid().t_start();
  return sup_distance(analytic, numeric, a + t_from, analytic.grid().t_end());
}

CommutationDefect commutation_defect(const SampleSeries& f, double eps, double f_at_a) {
  if (!(eps > 0.0 && eps < 1.0))
    throw DomainError("commutation_defect: eps must lie in (0,1), got " + std::to_string(eps));
  const Grid& g = f.grid();
  const double a = g.t_start();
  std::vector<double> exact(g.size());
  const double c = f_at_a / std::tgamma(eps);
  exact[0] = f_at_a == 0.0 ? 0.0 : kNaN;
  for (std::size_t j = 1; j < g.size(); ++j) exact[j] = c * std::pow(g.node(j) - a, eps - 1.0);

  const auto lhs = differentiate(fractional_integral(f, eps));
  const auto rhs = fractional_integral(differentiate(f), eps);
  std::vector<double> num(g.size());
  num[0] = kNaN;
  for (std::size_t j = 1; j < g.size(); ++j) num[j] = lhs[j] - rhs[j];
  return {SampleSeries(g, std::move(exact)), SampleSeries(g, std::move(num))};
}

double prop1_shift(const FracOrder& order, double f_m_at_a, double t, double a) {
  order.require_fractional("prop1_shift");
  if (t < a) throw DomainError("prop1_shift: t must not precede a");
  if (f_m_at_a == 0.0) return 0.0;
  const double p = order.epsilon() - 1.0;
  if (t == a) throw DomainError("prop1_shift: correction is singular at t = a");
  return std::pow(t - a, p) / std::tgamma(order.epsilon()) * f_m_at_a;
}

double prop1_shift_average(const FracOrder& order, double f_m_at_a, double t0, double t1,
                           double a) {
  order.require_fractional("prop1_shift_average");
  if (!(t1 > t0) || t0 < a) throw DomainError("prop1_shift_average: need a <= t0 < t1");
  const double e = order.epsilon();
  return f_m_at_a * (std::pow(t1 - a, e) - std::pow(t0 - a, e)) / (std::tgamma(e + 1.0) * (t1 - t0));
}

}  // namespace fracdyn
