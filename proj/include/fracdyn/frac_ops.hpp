#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "fracdyn/grid.hpp"
#include "fracdyn/kernels.hpp"

namespace fracdyn {

/// Left fractional integral J^eps f on the series grid, 0 < eps <= 1.
///
/// Product-trapezoidal rule: f is interpolated piecewise linearly and the
/// weakly singular kernel (t - tau)^{eps-1}/Gamma(eps) is integrated exactly,
/// so the result is exact for piecewise-linear f and O(h^2) for smooth f.
SampleSeries fractional_integral(const SampleSeries& f, double eps,
                                 kernels::Exec exec = kernels::Exec::kParallel);

/// Right fractional integral: (1/Gamma(eps)) int_t^b (tau - t)^{eps-1} f(tau) dtau.
SampleSeries fractional_integral_right(const SampleSeries& f, double eps,
                                       kernels::Exec exec = kernels::Exec::kParallel);

/// Left Caputo derivative _aD^alpha_t f = J^{m-alpha} f^{(m)}.
/// `f_m` holds samples of the m-th integer derivative of f.
SampleSeries caputo_left(const SampleSeries& f_m, const FracOrder& order,
                         kernels::Exec exec = kernels::Exec::kParallel);

/// Right Caputo derivative _tD^alpha_b f = (-1)^m J_right^{m-alpha} f^{(m)}.
SampleSeries caputo_right(const SampleSeries& f_m, const FracOrder& order,
                          kernels::Exec exec = kernels::Exec::kParallel);

/// Convenience: differentiates f m times by central differences, then calls
/// caputo_left. The differencing costs accuracy near the ends (first order
/// one-sided stencils there); prefer caputo_left with analytic f^{(m)}.
SampleSeries caputo_left_from_samples(const SampleSeries& f, const FracOrder& order);

/// Integer derivative by central differences (second-order one-sided at ends).
SampleSeries differentiate(const SampleSeries& f, int times = 1);

/// Riemann-Liouville derivative D^m J^{m-alpha} f. Slot 0 is NaN.
SampleSeries riemann_liouville_left(const SampleSeries& f, const FracOrder& order,
                                    kernels::Exec exec = kernels::Exec::kParallel);

/// Right Riemann-Liouville derivative (-D)^m J_right^{m-alpha} f. Last slot is NaN.
SampleSeries riemann_liouville_right(const SampleSeries& f, const FracOrder& order,
                                     kernels::Exec exec = kernels::Exec::kParallel);

/// Causal Caputo derivative of a sampled history, evaluated at its newest
/// sample. L1 scheme on first differences for 0 < alpha < 1; for
/// 1 < alpha < 2 the L1 scheme of order alpha-1 runs on velocity increments
/// reconstructed from second differences, with `initial_slope` = x'(a)
/// (estimated from the leading samples when absent).
///
/// Only samples 0..j are read. An optional memory window (in steps) drops
/// older increments; it is an approximation and off by default.
class CaputoHistory {
 public:
  CaputoHistory(const FracOrder& order, double h, std::optional<std::size_t> memory_window = {});

  const FracOrder& order() const noexcept { return order_; }

  double evaluate(std::span<const double> x, std::size_t j,
                  std::optional<double> initial_slope = {});

  /// d evaluate(x, j) / d x[j]; the result is affine in the newest sample.
  double newest_weight(std::size_t j) const;

 private:
  FracOrder order_;
  double h_;
  double beta_;
  double scale_;
  std::optional<std::size_t> window_;
  kernels::L1Weights weights_;
  std::vector<double> increments_;
};

double caputo_left_history(const SampleSeries& q_history, const FracOrder& order,
                           std::optional<double> initial_slope = {});

/// Analytic defect D^1 J^eps f - J^eps D^1 f = (t-a)^{eps-1}/Gamma(eps) f(a),
/// together with the numerically measured difference of the two operator orders.
struct CommutationDefect {
  SampleSeries analytic;  // slot 0 NaN when f(a) != 0
  SampleSeries numeric;   // slot 0 NaN
  /// sup |analytic - numeric| over nodes with t - a >= t_from.
  double mismatch(double t_from) const;
};

CommutationDefect commutation_defect(const SampleSeries& f, double eps, double f_at_a);

/// Correction of the derivative-shift identity
///   d/dt (_aD^alpha_t f) = _aD^{alpha+1}_t f + (t-a)^{m-alpha-1}/Gamma(m-alpha) f^{(m)}(a).
double prop1_shift(const FracOrder& order, double f_m_at_a, double t, double a = 0.0);

/// Average of the shift correction over [t0, t1]; finite at t0 = a.
double prop1_shift_average(const FracOrder& order, double f_m_at_a, double t0, double t1,
                           double a = 0.0);

}  // namespace fracdyn
