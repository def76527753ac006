#include <cmath>
#include <numeric>

#include "fracdyn/constrained_dynamics.hpp"
#include "fracdyn/fode_solver.hpp"
#include "fracdyn/frac_ops.hpp"
#include "fracdyn/oscillator_exact.hpp"

namespace fracdyn {

namespace {

double harmonic_error(double h) {
  ClassicalSystem rhs(1, [](double, const Eigen::VectorXd& q, const Eigen::VectorXd&) {
    return (-q).eval();
  });
  IntegratorConfig cfg{h, 10.0, Scheme::kVelocityVerlet, {}, 1e12};
  const auto res = integrate_second_order(rhs, Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(1), cfg);
  return sup_distance(res.position(0), [](double t) { return std::cos(t); }, 0.0, 10.0);
}

double quadrature_error(double h) {
  const Grid g = Grid::with_step(0.0, 1.0, h);
  const auto f = SampleSeries::sample(g, [](double t) { return t * t; });
  const auto j = fractional_integral(f, 0.5);
  const double c = 2.0 / std::tgamma(3.5);
  return sup_distance(j, [c](double t) { return c * std::pow(t, 2.5); }, 0.0, 1.0);
}

double caputo_pt_error(double h) {
  const Grid g = Grid::with_step(0.0, 1.0, h);
  const auto f1 = SampleSeries::sample(g, [](double t) { return 3.0 * t * t; });
  const auto d = caputo_left(f1, FracOrder(0.5));
  const double c = 6.0 / std::tgamma(3.5);
  return sup_distance(d, [c](double t) { return c * std::pow(t, 2.5); }, 0.0, 1.0);
}

double caputo_l1_error(double h) {
  const Grid g = Grid::with_step(0.0, 1.0, h);
  const auto f = SampleSeries::sample(g, [](double t) { return t * t; });
  return std::abs(caputo_left_history(f, FracOrder(0.5)) - 2.0 / std::tgamma(2.5));
}

OscillatorSpec reference_oscillator() { return OscillatorSpec::from_initial_data(2.5, 1.0, 1.0, 0.0); }

double oscillator_abm_error(double h) {
  const OscillatorSpec spec = reference_oscillator();
  IntegratorConfig cfg{h, 10.0, Scheme::kAbmFractional, {}, 1e12};
  const double init[] = {spec.q0, spec.qp0};
  const auto res = integrate_fractional_abm(
      spec.derivative_order(),
      [&spec](double t, double x) { return forcing(spec, t) - spec.omega2 * x; }, init, cfg);
  const auto exact = exact_solution(spec, res.grid);
  return sup_distance(res.position(0), exact, 0.0, 10.0);
}

double oscillator_1d_error(double h) {
  const OscillatorSpec spec = reference_oscillator();
  SystemSpec sys;
  sys.n = 1;
  sys.constraint = LinearConstraint{Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1), FracOrder(1.5)};
  sys.q_init = Eigen::VectorXd::Constant(1, spec.q0);
  sys.qdot_init = Eigen::VectorXd::Constant(1, spec.qp0);
  const auto res = simulate(sys, IntegratorConfig{h, 10.0, Scheme::kVelocityVerlet, {}, 1e12});
  return sup_distance(res.position(0), exact_solution(spec, res.grid), 0.0, 10.0);
}

}  // namespace

double convergence_error(const std::string& problem, double h) {
  if (!(h > 0.0)) throw DomainError("convergence: step must be positive");
  if (problem == "harmonic") return harmonic_error(h);
  if (problem == "quadrature") return quadrature_error(h);
  if (problem == "caputo-pt") return caputo_pt_error(h);
  if (problem == "caputo-l1") return caputo_l1_error(h);
  if (problem == "oscillator-abm") return oscillator_abm_error(h);
  if (problem == "oscillator-1d") return oscillator_1d_error(h);
  throw DomainError("convergence: unknown problem '" + problem + "'");
}

ConvergenceTable convergence_study(const std::string& problem, std::span<const double> h_ladder) {
  if (h_ladder.size() < 3) throw DomainError("convergence: ladder must have >= 3 rungs");
  ConvergenceTable table;
  table.problem = problem;
  for (std::size_t i = 0; i < h_ladder.size(); ++i) {
    const double h = h_ladder[i];
    const double e = convergence_error(problem, h);
    double order = std::numeric_limits<double>::quiet_NaN();
    if (i > 0) {
      const auto& prev = table.rows.back();
      order = std::log(prev.error / e) / std::log(prev.h / h);
      if (!(e < prev.error)) table.monotone = false;
    }
    table.rows.push_back({h, e, order});
  }
  return table;
}

double ConvergenceTable::fitted_order() const {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double n = 0;
  for (const auto& r : rows) {
    if (!(r.error > 0.0)) continue;
    const double x = std::log(r.h), y = std::log(r.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    n += 1;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace fracdyn
