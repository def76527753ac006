#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracdyn/errors.hpp"
#include "fracdyn/grid.hpp"

namespace fracdyn {

enum class Scheme { kSemiImplicitEuler, kVelocityVerlet, kAbmFractional };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct IntegratorConfig {
  double h = 1e-3;
  double t_end = 1.0;
  Scheme scheme = Scheme::kVelocityVerlet;
  /// Short-memory truncation of fractional history sums, in steps (>= 10).
  /// Approximate; off unless set.
  std::optional<std::size_t> history_window;
  double divergence_threshold = 1e12;

  Grid grid() const;
  void validate() const;
};

/// Positions and velocities of a second-order trajectory, one column per node.
/// Right-hand sides see samples 0..newest() only.
class TrajectoryHistory {
 public:
  TrajectoryHistory(std::size_t dim, double t0, double h, std::size_t capacity);

  std::size_t dim() const noexcept { return dim_; }
  double step() const noexcept { return h_; }
  double t0() const noexcept { return t0_; }
  std::size_t newest() const noexcept { return count_ - 1; }
  std::size_t capacity() const noexcept { return capacity_; }
  double time(std::size_t j) const noexcept { return t0_ + static_cast<double>(j) * h_; }

  /// Samples 0..newest() of component k.
  std::span<const double> q(std::size_t k) const;
  std::span<const double> v(std::size_t k) const;
  Eigen::VectorXd q_at(std::size_t j) const;
  Eigen::VectorXd v_at(std::size_t j) const;

  void push(const Eigen::VectorXd& q, const Eigen::VectorXd& v);
  void overwrite_newest_velocity(const Eigen::VectorXd& v);

  /// The integrator advances q_{j+1} = q_j + h q'_j + theta h^2 q''_j with
  /// q''_j the accelerations returned at node j; theta is published here.
  double position_weight() const noexcept { return theta_; }
  void set_position_weight(double theta) noexcept { theta_ = theta; }

 private:
  std::size_t dim_;
  double t0_;
  double h_;
  std::size_t capacity_;
  std::size_t count_ = 0;
  double theta_ = 1.0;
  std::vector<std::vector<double>> q_;
  std::vector<std::vector<double>> v_;
};

struct StepDiagnostics {
  std::size_t history_terms = 0;  // memory-sum terms evaluated in the step
  double correction = 0.0;        // |initial-value correction| applied in the step
};

/// Causal right-hand side q'' = F(t, history).
class SecondOrderSystem {
 public:
  virtual ~SecondOrderSystem() = default;
  virtual std::size_t dimension() const = 0;
  /// Accelerations at the newest sample of `hist`.
  virtual Eigen::VectorXd accelerations(const TrajectoryHistory& hist) = 0;
  /// Multiplier of the last accelerations() call (0 when unconstrained).
  virtual double last_multiplier() const { return 0.0; }
  /// Constraint value at the newest sample; empty when no constraint is active.
  virtual std::optional<double> constraint_residual(const TrajectoryHistory&) { return {}; }
  virtual StepDiagnostics last_diagnostics() const { return {}; }
};

/// q'' = F(t, q, q') without memory terms.
class ClassicalSystem : public SecondOrderSystem {
 public:
  using Fn = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&, const Eigen::VectorXd&)>;
  ClassicalSystem(std::size_t dim, Fn f) : dim_(dim), f_(std::move(f)) {}
  std::size_t dimension() const override { return dim_; }
  Eigen::VectorXd accelerations(const TrajectoryHistory& hist) override;

 private:
  std::size_t dim_;
  Fn f_;
};

struct SimulationResult {
  Grid grid{0.0, 1.0, 1};
  std::vector<Eigen::VectorXd> q;
  std::vector<Eigen::VectorXd> qdot;
  std::vector<Eigen::VectorXd> p;  // momenta (Hamilton form only)
  std::vector<double> multiplier;
  std::vector<double> constraint_residual;  // empty when no constraint
  std::vector<StepDiagnostics> diagnostics;
  Scheme scheme = Scheme::kVelocityVerlet;
  double h = 0.0;

  std::size_t dim() const { return q.empty() ? 0 : static_cast<std::size_t>(q.front().size()); }
  SampleSeries position(std::size_t k) const;
  SampleSeries velocity(std::size_t k) const;
  double max_abs_residual() const;
  std::size_t total_history_terms() const;
};

/// Integration stopped because the state blew up; carries the partial result.
class SimulationDivergence : public DivergenceError {
 public:
  SimulationDivergence(const std::string& what, double t, std::size_t step, SimulationResult partial);
  const SimulationResult& partial() const noexcept { return partial_; }

 private:
  SimulationResult partial_;
};

/// Fixed-step integration of q'' = F with semi-implicit Euler or velocity
/// Verlet. Fractional history terms inside F see velocities of the newest
/// sample one stage late (lagged) in the Verlet scheme.
SimulationResult integrate_second_order(SecondOrderSystem& rhs, const Eigen::VectorXd& q0,
                                        const Eigen::VectorXd& v0, const IntegratorConfig& cfg);

/// Adams-Bashforth-Moulton predictor-corrector for the Caputo problem
///   D^alpha x = f(t, x),  x^{(k)}(0) = init[k], k < ceil(alpha),  0 < alpha < 3.
SimulationResult integrate_fractional_abm(double alpha,
                                          const std::function<double(double, double)>& f,
                                          std::span<const double> init, const IntegratorConfig& cfg);

/// One rung of a convergence ladder.
struct ConvergenceRow {
  double h;
  double error;
  double order;  // NaN on the first rung
};

struct ConvergenceTable {
  std::string problem;
  std::vector<ConvergenceRow> rows;
  bool monotone = true;
  /// Least-squares slope of log(error) against log(h).
  double fitted_order() const;
};

/// Problems: "harmonic", "quadrature", "caputo-pt", "caputo-l1", "oscillator-abm",
/// "oscillator-1d" (constraint chain against the exact oscillator).
ConvergenceTable convergence_study(const std::string& problem, std::span<const double> h_ladder);

/// Error of one problem at step h against its oracle.
double convergence_error(const std::string& problem, double h);

}  // namespace fracdyn
