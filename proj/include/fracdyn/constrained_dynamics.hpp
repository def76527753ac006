#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "fracdyn/errors.hpp"
#include "fracdyn/fode_solver.hpp"
#include "fracdyn/frac_ops.hpp"
#include "fracdyn/grid.hpp"

namespace fracdyn {

/// Arguments of a constraint f(q, q', D^alpha_left q, D^alpha_right q).
struct ConstraintPoint {
  Eigen::VectorXd q;
  Eigen::VectorXd qdot;
  Eigen::VectorXd d_left;
  Eigen::VectorXd d_right;
};

/// f = a.q' + b.D^alpha_left q
struct LinearConstraint {
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  FracOrder order{0.5};
};

struct GeneralConstraint {
  using Value = std::function<double(const ConstraintPoint&)>;
  using Gradient = std::function<Eigen::VectorXd(const ConstraintPoint&)>;
  Value f;
  Gradient d_q;       // empty: identically zero
  Gradient d_qdot;    // required
  Gradient d_dleft;   // empty: identically zero
  Gradient d_dright;  // empty: identically zero
  FracOrder order{0.5};
};

using ConstraintSpec = std::variant<LinearConstraint, GeneralConstraint>;

GeneralConstraint to_general(const LinearConstraint& c);
const FracOrder& constraint_order(const ConstraintSpec& c);

struct Potential {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;

  static Potential zero();
  /// u = 1/2 sum k_i q_i^2
  static Potential quadratic(Eigen::VectorXd k);
};

struct SystemSpec {
  std::size_t n = 1;
  Potential potential = Potential::zero();
  std::optional<ConstraintSpec> constraint;
  Eigen::VectorXd q_init;
  Eigen::VectorXd qdot_init;
  std::optional<Eigen::VectorXd> higher_init;  // q^{(m)}(a)

  void validate() const;
};

/// Time derivatives of the fractional terms, d/dt D^alpha q.
struct FracRates {
  Eigen::VectorXd d1_left;
  Eigen::VectorXd d1_right;  // empty: zero
};

/// Multiplier of the d'Alembert-Lagrange equations at one state.
double lambda_general(const SystemSpec& sys, const ConstraintPoint& x, const FracRates& rates);

/// q'' = -grad u + (df/dq') lambda.
Eigen::VectorXd general_accelerations(const SystemSpec& sys, const ConstraintPoint& x,
                                      const FracRates& rates);

/// P = I - a a^T / a^2
Eigen::MatrixXd projector(const Eigen::VectorXd& a);

/// q'' = -P grad u - a (b . d1) / a^2
Eigen::VectorXd linear_accelerations(const LinearConstraint& c, const Eigen::VectorXd& grad_u,
                                     const Eigen::VectorXd& d1_left);

enum class D1DalphaMode {
  /// (D^alpha q(t_{j+1}) - D^alpha q(t_j)) / h, with the newest sample taken
  /// from the step map q_{j+1} = q_j + h q'_j + theta h^2 q''_j; the term is
  /// affine in q''_j and solved for (linearly implicit).
  kDirect,
  /// D^alpha q' (= D^{alpha+1} q) plus the step-averaged shift correction;
  /// explicit, lagged by one stage.
  kShifted,
};

/// kShifted for alpha < 1, kDirect for 1 < alpha < 2 where the explicit
/// form is unstable.
D1DalphaMode default_mode(const FracOrder& order);

struct ConstrainedOptions {
  std::optional<D1DalphaMode> mode;  // empty: default_mode(order)
  std::optional<std::size_t> history_window;
  bool project_initial = false;
  double initial_tolerance = 1e-10;
};

/// Right-hand side of the constrained equations of motion. Owns its history
/// caches; one integration per instance. Right-sided terms are not used in
/// forward integration.
class ConstrainedSystem : public SecondOrderSystem {
 public:
  ConstrainedSystem(SystemSpec sys, ConstrainedOptions opts);

  std::size_t dimension() const override { return sys_.n; }
  Eigen::VectorXd accelerations(const TrajectoryHistory& hist) override;
  double last_multiplier() const override { return lambda_; }
  std::optional<double> constraint_residual(const TrajectoryHistory& hist) override;
  StepDiagnostics last_diagnostics() const override { return diag_; }

  const SystemSpec& spec() const noexcept { return sys_; }
  /// q'(a), after projection when requested.
  const Eigen::VectorXd& initial_velocity() const noexcept { return v0_; }
  /// q^{(m)}(a) used by the shift correction.
  const Eigen::VectorXd& initial_higher() const noexcept { return higher_; }
  /// Causal D^alpha_left q_k at node j (after accelerations() reached j).
  double dalpha(std::size_t k, std::size_t j) const { return dalpha_[k][j]; }

 private:
  void update_dalpha(const TrajectoryHistory& hist);
  ConstraintPoint point(const TrajectoryHistory& hist, std::size_t j) const;
  D1DalphaMode mode() const { return *opts_.mode; }

  SystemSpec sys_;
  ConstrainedOptions opts_;
  std::optional<GeneralConstraint> general_;
  std::optional<LinearConstraint> linear_;
  Eigen::VectorXd v0_;
  Eigen::VectorXd higher_;
  std::vector<CaputoHistory> q_hist_;
  std::vector<CaputoHistory> v_hist_;
  std::vector<std::vector<double>> dalpha_;
  std::vector<double> scratch_;
  double lambda_ = 0.0;
  StepDiagnostics diag_;
};

/// General (multiplier-eliminated) form.
std::unique_ptr<ConstrainedSystem> rhs_general(const SystemSpec& sys, ConstrainedOptions opts = {});
/// Closed-form linear-constraint form; a = 0 raises SingularConstraintError.
std::unique_ptr<ConstrainedSystem> rhs_linear(const SystemSpec& sys, ConstrainedOptions opts = {});

/// Integrates sys from its initial data.
SimulationResult simulate(const SystemSpec& sys, const IntegratorConfig& cfg,
                          ConstrainedOptions opts = {});

struct Case2Coordinates {
  double x;
  double y;
  std::function<double(double, double)> U;  // U(x, y) = u(x + y, x - y)
};

Case2Coordinates twodim_case2_transform(double q1, double q2,
                                        std::function<double(double, double)> u);
std::pair<double, double> twodim_case2_inverse(double x, double y);

/// x'' = -g D^eps x - g^2 K(x), eps = 2 - alpha (reduced), or
/// x'' = -g D^1 D^alpha x - g D^1 J^eps K(x) (pre-reduction, both D^1 terms
/// as forward differences; the D^alpha one is solved for x'' as in kDirect).
class NonlinearFracOscillator : public SecondOrderSystem {
 public:
  enum class Form { kReduced, kPreReduction };
  NonlinearFracOscillator(double g, std::function<double(double)> K, const FracOrder& order,
                          Form form = Form::kReduced);

  std::size_t dimension() const override { return 1; }
  Eigen::VectorXd accelerations(const TrajectoryHistory& hist) override;
  StepDiagnostics last_diagnostics() const override { return diag_; }

 private:
  double g_;
  std::function<double(double)> K_;
  FracOrder order_;
  Form form_;
  std::optional<CaputoHistory> eps_hist_;
  std::optional<CaputoHistory> alpha_hist_;
  std::optional<kernels::ProductTrapezoidWeights> jw_;
  std::vector<double> k_hist_;
  std::vector<double> dalpha_;
  std::vector<double> jk_;
  std::vector<double> scratch_;
  StepDiagnostics diag_;
};

std::unique_ptr<NonlinearFracOscillator> rhs_nonlinear_frac_oscillator(
    double g, std::function<double(double)> K, const FracOrder& order,
    NonlinearFracOscillator::Form form = NonlinearFracOscillator::Form::kReduced);

/// Constraint f = A(q, D^alpha q) . q' in Hamilton form.
struct HamiltonSpec {
  using AFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>;
  using DAFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>;
  std::size_t n = 2;
  Potential potential = Potential::zero();
  AFn A;
  DAFn dA_dq;  // (l, k) = dA_l/dq_k; empty: zero
  DAFn dA_dd;  // (l, k) = dA_l/d(D^alpha q_k); empty: zero
  FracOrder order{0.5};
  Eigen::VectorXd q_init;
  Eigen::VectorXd p_init;

  static HamiltonSpec constant(const Eigen::VectorXd& a, Potential u, const FracOrder& order,
                               Eigen::VectorXd q0, Eigen::VectorXd p0);
  void validate() const;
};

struct HamiltonRates {
  Eigen::VectorXd qdot;
  Eigen::VectorXd pdot;
  double mu;
};

/// Rates at one state. `frac_term` is the causal D^alpha of the integrand
/// mu sum_l dA_l/d(D^alpha q_k) q'_l, supplied by the caller.
HamiltonRates hamilton_rhs(const HamiltonSpec& spec, const Eigen::VectorXd& q,
                           const Eigen::VectorXd& p, const Eigen::VectorXd& dalpha_q,
                           const Eigen::VectorXd& frac_term);

/// Symplectic Euler or Stormer-Verlet on (q, p); result carries p and mu.
SimulationResult integrate_hamilton(const HamiltonSpec& spec, const IntegratorConfig& cfg);

struct VariationalReport {
  std::vector<SampleSeries> residual;  // per k; end nodes NaN
  /// |bracket projected onto Chetaev-admissible variations| per node.
  SampleSeries bracket;
};

/// Residual of the variational Euler-Lagrange equations on a completed
/// trajectory for a caller-supplied multiplier mu(t).
VariationalReport variational_residual(const SimulationResult& traj, const SampleSeries& mu,
                                       const SystemSpec& sys);

}  // namespace fracdyn
