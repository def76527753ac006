#include "fracdyn/oscillator_exact.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "fracdyn/errors.hpp"
#include "fracdyn/mittag_leffler.hpp"
#include "gauss_legendre.hpp"

namespace fracdyn {

OscillatorSpec OscillatorSpec::from_initial_data(double alpha, double omega2, double q0, double qp0) {
  OscillatorSpec s;
  s.alpha = alpha;
  s.omega2 = omega2;
  s.q0 = q0;
  s.qp0 = qp0;
  s.c2 = omega2 * q0;
  s.c1 = omega2 * qp0;
  return s;
}

OscillatorSpec OscillatorSpec::homogeneous(double alpha, double omega2, double q0, double qp0) {
  OscillatorSpec s;
  s.alpha = alpha;
  s.omega2 = omega2;
  s.q0 = q0;
  s.qp0 = qp0;
  s.forcing = Forcing::kNone;
  return s;
}

int OscillatorSpec::m() const { return static_cast<int>(std::floor(alpha)) + 1; }

void OscillatorSpec::validate_exact() const {
  if (!(alpha > 2.0 && alpha < 3.0))
    throw DomainError("oscillator: exact solution needs 2 < alpha < 3, got " + std::to_string(alpha));
  if (!(omega2 > 0.0)) throw DomainError("oscillator: omega2 must be positive");
}

double forcing(const OscillatorSpec& spec, double t) {
  if (t < 0.0) throw DomainError("forcing: t must be non-negative");
  if (spec.forcing == OscillatorSpec::Forcing::kNone) return 0.0;
  const double p = spec.m() - spec.alpha + 1.0;
  const double chain = spec.q0 == 0.0 ? 0.0 : std::pow(t, p) / std::tgamma(p + 1.0) * spec.q0;
  return chain + spec.c1 * t + spec.c2;
}

namespace {

// Moments of tau^{b-1} against the two hat functions of [tau_i, tau_{i+1}].
void panel_moments(double b, double h, std::size_t n, std::vector<double>& lower,
                   std::vector<double>& upper) {
  lower.assign(n, 0.0);
  upper.assign(n, 0.0);
  const auto& gl = detail::gauss_legendre<8>();
  for (std::size_t i = 0; i < n; ++i) {
    const double t0 = static_cast<double>(i) * h, t1 = t0 + h;
    if (i < 16) {
      // exact power moments; cancellation is mild for small i
      const double m0 = (std::pow(t1, b) - std::pow(t0, b)) / b;
      const double m1 = (std::pow(t1, b + 1.0) - std::pow(t0, b + 1.0)) / (b + 1.0);
      lower[i] = (t1 * m0 - m1) / h;
      upper[i] = (m1 - t0 * m0) / h;
    } else {
      lower[i] = gl.integrate(t0, t1, [&](double s) { return std::pow(s, b - 1.0) * (t1 - s) / h; });
      upper[i] = gl.integrate(t0, t1, [&](double s) { return std::pow(s, b - 1.0) * (s - t0) / h; });
    }
  }
}

void check_grid(const Grid& grid) {
  if (grid.t_start() != 0.0) throw DomainError("oscillator: grid must start at t = 0");
}

}  // namespace

SampleSeries forcing_convolution(const OscillatorSpec& spec, const Grid& grid, kernels::Exec exec) {
  spec.validate_exact();
  check_grid(grid);
  if (spec.forcing == OscillatorSpec::Forcing::kNone) return SampleSeries::zeros(grid);

  const std::size_t r =
      static_cast<std::size_t>(std::max(1.0, std::ceil(grid.step() / kConvolutionStep - 1e-9)));
  const std::size_t nf = grid.n_steps() * r;
  const double hf = grid.step() / static_cast<double>(r);
  const double b = spec.derivative_order();

  std::vector<double> q(nf + 1), g(nf + 1), out(nf + 1);
  const long nn = static_cast<long>(nf + 1);
  const MLParams kernel{b, b};
  kernels::for_each_index(nn, exec, [&](long i) {
    const double tau = static_cast<double>(i) * hf;
    g[static_cast<std::size_t>(i)] = ml(kernel, -spec.omega2 * std::pow(tau, b));
    q[static_cast<std::size_t>(i)] = forcing(spec, tau);
  });
  std::vector<double> lower, upper;
  panel_moments(b, hf, nf, lower, upper);
  kernels::weighted_convolution(q, g, lower, upper, out, exec);

  std::vector<double> coarse(grid.size());
  for (std::size_t j = 0; j < coarse.size(); ++j) coarse[j] = out[j * r];
  return {grid, std::move(coarse)};
}

SampleSeries exact_solution(const OscillatorSpec& spec, const Grid& grid, kernels::Exec exec) {
  spec.validate_exact();
  check_grid(grid);
  const double b = spec.derivative_order();
  const auto conv = forcing_convolution(spec, grid, exec);
  std::vector<double> v(grid.size());
  const long nn = static_cast<long>(grid.size());
  kernels::for_each_index(nn, exec, [&](long j) {
    const double t = grid.node(static_cast<std::size_t>(j));
    const double z = -spec.omega2 * std::pow(t, b);
    double y = spec.q0 * ml({b, 1.0}, z);
    if (spec.qp0 != 0.0) y += t * spec.qp0 * ml({b, 2.0}, z);
    v[static_cast<std::size_t>(j)] = y + conv[static_cast<std::size_t>(j)];
  });
  return {grid, std::move(v)};
}

SampleSeries decomposed_solution(const OscillatorSpec& spec, const Grid& grid) {
  spec.validate_exact();
  check_grid(grid);
  if (spec.omega2 != 1.0) throw DomainError("decomposed_solution: requires omega2 == 1");
  const double b = spec.derivative_order();
  const auto conv = forcing_convolution(spec, grid);
  std::vector<double> v(grid.size());
  v[0] = spec.q0 + conv[0];
  kernels::for_each_index(static_cast<long>(grid.size()) - 1, kernels::Exec::kParallel, [&](long i) {
    const std::size_t j = static_cast<std::size_t>(i) + 1;
    const double t = grid.node(j);
    double y = 0.0;
    if (spec.q0 != 0.0) y += spec.q0 * (ml_decomp_f(b, 0, t) + ml_decomp_g(b, 0, t));
    if (spec.qp0 != 0.0) y += spec.qp0 * (ml_decomp_f(b, 1, t) + ml_decomp_g(b, 1, t));
    v[j] = y + conv[j];
  });
  return {grid, std::move(v)};
}

}  // namespace fracdyn
