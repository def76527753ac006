#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "fracdyn/constrained_dynamics.hpp"
#include "talbot.hpp"

using namespace fracdyn;
using Eigen::VectorXd;
using cplx = std::complex<double>;

namespace {

VectorXd v2(double a, double b) { return (VectorXd(2) << a, b).finished(); }

SystemSpec linear2(double alpha, VectorXd a, VectorXd b, VectorXd k, VectorXd q0) {
  SystemSpec s;
  s.n = static_cast<std::size_t>(a.size());
  s.potential = Potential::quadratic(std::move(k));
  s.constraint = LinearConstraint{std::move(a), std::move(b), FracOrder(alpha)};
  s.q_init = std::move(q0);
  s.qdot_init = VectorXd::Zero(static_cast<Eigen::Index>(s.n));
  return s;
}

ConstrainedOptions with_mode(D1DalphaMode m) {
  ConstrainedOptions o;
  o.mode = m;
  return o;
}

double sup_q(const SimulationResult& a, const SimulationResult& b) {
  double e = 0.0;
  for (std::size_t j = 0; j < a.q.size(); ++j) e = std::max(e, (a.q[j] - b.q[j]).cwiseAbs().maxCoeff());
  return e;
}

}  // namespace

TEST_CASE("projector identities") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 10; ++trial) {
    VectorXd a(4);
    for (int i = 0; i < 4; ++i) a[i] = nd(rng);
    const Eigen::MatrixXd P = projector(a);
    CHECK((P * P - P).norm() < 1e-13);
    CHECK((P * a).norm() < 1e-13);
    CHECK(P.trace() == doctest::Approx(3.0));
  }
  CHECK_THROWS_AS(projector(VectorXd::Zero(3)), SingularConstraintError);
}

TEST_CASE("multiplier of the linear 1D constraint") {
  // f = a q' + b D^alpha q, u = 0  =>  lambda = -(b/a) d/dt D^alpha q
  SystemSpec s = linear2(0.5, VectorXd::Constant(1, 2.0), VectorXd::Constant(1, 3.0), VectorXd::Zero(1), VectorXd::Ones(1));
  s.potential = Potential::zero();
  const ConstraintPoint x{VectorXd::Ones(1), VectorXd::Zero(1), VectorXd::Constant(1, 0.4), VectorXd::Zero(1)};
  const double rate = 0.7;
  CHECK(lambda_general(s, x, {VectorXd::Constant(1, rate), {}}) == doctest::Approx(-(3.0 / 2.0) * rate / 2.0));
  // q'' = a lambda = -(b/a) rate
  CHECK(general_accelerations(s, x, {VectorXd::Constant(1, rate), {}})[0] == doctest::Approx(-(3.0 / 2.0) * rate));
}

TEST_CASE("closed-form linear accelerations equal the general formula") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 10; ++trial) {
    VectorXd a(3), b(3), k(3), q(3), d1(3);
    for (int i = 0; i < 3; ++i) {
      a[i] = nd(rng);
      b[i] = nd(rng);
      k[i] = std::abs(nd(rng));
      q[i] = nd(rng);
      d1[i] = nd(rng);
    }
    const SystemSpec s = linear2(0.5, a, b, k, q);
    const ConstraintPoint x{q, VectorXd::Zero(3), VectorXd::Zero(3), VectorXd::Zero(3)};
    const VectorXd grad = k.cwiseProduct(q);
    const LinearConstraint c{a, b, FracOrder(0.5)};
    CHECK((general_accelerations(s, x, {d1, {}}) - linear_accelerations(c, grad, d1)).norm() < 1e-12);
  }
}

TEST_CASE("singular and inconsistent constraints are rejected") {
  SystemSpec s = linear2(0.5, VectorXd::Zero(2), v2(1, 1), VectorXd::Ones(2), v2(1, 0));
  CHECK_THROWS_AS(rhs_linear(s), SingularConstraintError);
  SystemSpec bad = linear2(0.5, v2(1, 1), v2(0, 0), VectorXd::Ones(2), v2(1, 0));
  bad.qdot_init = v2(1, 0);
  CHECK_THROWS_AS(rhs_linear(bad), ConstraintViolationError);
  ConstrainedOptions o;
  o.project_initial = true;
  const auto sys = rhs_linear(bad, o);
  CHECK(std::abs(sys->initial_velocity().sum()) < 1e-12);
}

TEST_CASE("b = 0 gives projected Newton dynamics") {
  const SystemSpec s = linear2(0.5, v2(1, 0), VectorXd::Zero(2), VectorXd::Ones(2), v2(0, 1));
  const auto r = simulate(s, {1e-3, 10.0});
  CHECK(sup_distance(r.position(1), [](double t) { return std::cos(t); }, 0, 10) < 1e-4);
  CHECK(sup_distance(r.position(0), [](double) { return 0.0; }, 0, 10) < 1e-14);
}

TEST_CASE("constraint residual shrinks with the step") {
  const SystemSpec s = linear2(0.5, v2(1, 0.5), v2(0.3, 0.2), v2(1, 2), v2(1, 0.75));
  const auto r1 = simulate(s, {1e-2, 10.0});
  const auto r2 = simulate(s, {5e-3, 10.0});
  CHECK(r1.max_abs_residual() / r2.max_abs_residual() >= std::pow(2.0, 0.75));
}

TEST_CASE("direct mode with semi-implicit Euler preserves the constraint to round-off") {
  for (double alpha : {0.5, 1.5}) {
    const SystemSpec s = linear2(alpha, v2(1, 0.5), v2(0.3, 0.2), v2(1, 2), v2(1, 0.75));
    const auto r = simulate(s, {1e-2, 10.0, Scheme::kSemiImplicitEuler}, with_mode(D1DalphaMode::kDirect));
    CAPTURE(alpha);
    CHECK(r.max_abs_residual() < 1e-12);
  }
}

TEST_CASE("direct and shifted modes converge to each other for alpha < 1") {
  const SystemSpec s = linear2(0.5, v2(1, 0.5), v2(0.3, 0.2), v2(1, 2), v2(1, 0.75));
  auto gap = [&](double h) {
    const IntegratorConfig cfg{h, 5.0, Scheme::kSemiImplicitEuler};
    return sup_q(simulate(s, cfg, with_mode(D1DalphaMode::kDirect)), simulate(s, cfg, with_mode(D1DalphaMode::kShifted)));
  };
  const double g1 = gap(1e-2), g2 = gap(5e-3);
  CHECK(g1 < 1e-3);
  CHECK(g1 / g2 > 1.7);
  CHECK(default_mode(FracOrder(0.5)) == D1DalphaMode::kShifted);
  CHECK(default_mode(FracOrder(1.5)) == D1DalphaMode::kDirect);
}

TEST_CASE("explicit shifted mode is unstable for alpha > 1") {
  const SystemSpec s = linear2(1.5, v2(1, 0.5), v2(0.3, 0.2), v2(1, 2), v2(1, 0.75));
  CHECK_THROWS_AS(simulate(s, {1e-2, 10.0}, with_mode(D1DalphaMode::kShifted)), DivergenceError);
  CHECK_NOTHROW(simulate(s, {1e-2, 10.0}));
}

TEST_CASE("Hamilton form with constant A matches the Lagrange form") {
  const SystemSpec s = linear2(0.5, v2(1, 0), VectorXd::Zero(2), VectorXd::Ones(2), v2(0, 1));
  const IntegratorConfig cfg{1e-3, 10.0};
  const auto L = simulate(s, cfg);
  const auto H = integrate_hamilton(HamiltonSpec::constant(v2(1, 0), s.potential, FracOrder(0.5), s.q_init, VectorXd::Zero(2)), cfg);
  CHECK(sup_q(L, H) < 1e-12);
  CHECK(H.p.size() == H.q.size());
}

TEST_CASE("case-2 coordinates invert") {
  const auto c = twodim_case2_transform(1.5, -0.5, [](double a, double b) { return a * a + 3 * b; });
  const auto [q1, q2] = twodim_case2_inverse(c.x, c.y);
  CHECK(q1 == doctest::Approx(1.5));
  CHECK(q2 == doctest::Approx(-0.5));
  CHECK(c.U(c.x, c.y) == doctest::Approx(1.5 * 1.5 - 1.5));
}

TEST_CASE("variational residual vanishes for mu' = -lambda when b = 0") {
  const SystemSpec s = linear2(0.5, v2(1, 0), VectorXd::Zero(2), VectorXd::Ones(2), v2(0, 1));
  const auto r = simulate(s, {1e-3, 2.0});
  std::vector<double> mu(r.q.size(), 0.0);
  for (std::size_t j = 1; j < mu.size(); ++j) mu[j] = mu[j - 1] - 0.5 * r.h * (r.multiplier[j] + r.multiplier[j - 1]);
  const auto rep = variational_residual(r, SampleSeries(r.grid, mu), s);
  CHECK(std::isnan(rep.residual[0][0]));
  double worst = 0.0;
  for (std::size_t j = 1; j + 1 < mu.size(); ++j)
    for (std::size_t k = 0; k < 2; ++k) worst = std::max(worst, std::abs(rep.residual[k][j]));
  CHECK(worst < 1e-2);
}

TEST_CASE("nonlinear fractional oscillator forms match their Laplace transforms") {
  // x(0) = 1, x'(0) = 0, K(x) = x, g = 1, alpha = 1.5
  auto reduced = [](cplx s) { return (s + std::pow(s, -0.5)) / (s * s + std::sqrt(s) + 1.0); };
  auto pre = [](cplx s) { return std::sqrt(s) * (1.0 + std::sqrt(s)) / (s * s + std::pow(s, 1.5) + 1.0); };
  auto run = [](NonlinearFracOscillator::Form f, Scheme sc) {
    NonlinearFracOscillator sys(1.0, [](double x) { return x; }, FracOrder(1.5), f);
    return integrate_second_order(sys, VectorXd::Ones(1), VectorXd::Zero(1), {5e-4, 5.0, sc});
  };
  const auto r = run(NonlinearFracOscillator::Form::kReduced, Scheme::kVelocityVerlet);
  const auto p = run(NonlinearFracOscillator::Form::kPreReduction, Scheme::kSemiImplicitEuler);
  for (double t : {1.0, 2.0, 3.0, 5.0}) {
    const auto j = static_cast<std::size_t>(std::llround(t / 5e-4));
    CAPTURE(t);
    CHECK(std::abs(r.q[j][0] - oracle::talbot(reduced, t)) < 1e-4);
    CHECK(std::abs(p.q[j][0] - oracle::talbot(pre, t)) < 5e-4);
  }
}
