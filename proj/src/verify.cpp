#include "fracdyn/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <stdexcept>

#include "fracdyn/constrained_dynamics.hpp"
#include "fracdyn/frac_ops.hpp"
#include "fracdyn/mittag_leffler.hpp"
#include "fracdyn/oscillator_exact.hpp"

namespace fracdyn {

bool VerifyReport::all_passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.passed; });
}

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> s = {"operators", "mittag-leffler", "oscillator",
                                             "constraints", "all"};
  return s;
}

namespace {

using Eigen::VectorXd;

class Suite {
 public:
  Suite(std::string name, std::vector<CheckRow>& rows) : name_(std::move(name)), rows_(rows) {}
  void at_most(const std::string& check, double measured, double tol) {
    rows_.push_back({name_, check, measured, tol, false, measured <= tol});
  }
  void at_least(const std::string& check, double measured, double tol) {
    rows_.push_back({name_, check, measured, tol, true, measured >= tol});
  }

 private:
  std::string name_;
  std::vector<CheckRow>& rows_;
};

double max_over(double lo, double hi, double step, const std::function<double(double)>& f) {
  double m = 0.0;
  const auto n = static_cast<long>(std::llround((hi - lo) / step));
  for (long i = 0; i <= n; ++i) m = std::max(m, f(lo + static_cast<double>(i) * step));
  return m;
}

double ladder_order(const std::function<double(double)>& err, std::initializer_list<double> hs) {
  std::vector<double> x, y;
  for (double h : hs) {
    x.push_back(std::log(h));
    y.push_back(std::log(err(h)));
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void operators(std::vector<CheckRow>& rows) {
  Suite s("operators", rows);
  s.at_most("J^0.5 t^2 power rule, h=1/1024", convergence_error("quadrature", 1.0 / 1024), 1e-6);
  s.at_most("Caputo^0.5 t^3 power rule, h=1/1024", convergence_error("caputo-pt", 1.0 / 1024), 2e-6);
  s.at_least("Caputo product-trapezoid order",
             ladder_order([](double h) { return convergence_error("caputo-pt", h); },
                          {1.0 / 256, 1.0 / 512, 1.0 / 1024, 1.0 / 2048, 1.0 / 4096}),
             1.8);
  s.at_least("Caputo L1 history order (alpha 0.5)",
             ladder_order([](double h) { return convergence_error("caputo-l1", h); },
                          {1.0 / 256, 1.0 / 512, 1.0 / 1024, 1.0 / 2048, 1.0 / 4096}),
             1.4);

  // d/dt D^alpha f = D^{alpha+1} f + shift, both sides numerical, at t = 1
  for (double alpha : {0.5, 1.5}) {
    for (bool with_shift : {false, true}) {
      const FracOrder ord(alpha);
      const int m = ord.m();
      const Grid g = Grid::with_step(0.0, 1.0, 1.0 / 4096);
      // f = t^3 (+ t + t^2): derivatives up to order m + 1
      auto d = [&](int k, double t) {
        const double c1 = with_shift ? 1.0 : 0.0;
        switch (k) {
          case 1: return 3 * t * t + c1 * (1 + 2 * t);
          case 2: return 6 * t + c1 * 2;
          default: return 6.0;
        }
      };
      const auto fm = SampleSeries::sample(g, [&](double t) { return d(m, t); });
      const auto fm1 = SampleSeries::sample(g, [&](double t) { return d(m + 1, t); });
      const double lhs = differentiate(caputo_left(fm, ord)).back();
      const double rhs = caputo_left(fm1, ord).back() + prop1_shift(ord, d(m, 0.0), 1.0);
      char name[96];
      std::snprintf(name, sizeof name, "derivative shift identity alpha=%.1f f=%s", alpha,
                    with_shift ? "t^3+t^2+t" : "t^3");
      s.at_most(name, std::abs(lhs - rhs), 1e-2);
    }
  }

  {
    const Grid g = Grid::with_step(0.0, 1.0, 1.0 / 2048);
    const auto f = SampleSeries::sample(g, [](double t) { return 1.0 + t; });
    s.at_most("commutation defect J^0.5 (1+t), t>=0.1", commutation_defect(f, 0.5, 1.0).mismatch(0.1),
              1e-3);
    const auto f2 = SampleSeries::sample(g, [](double t) { return 1.0 + t * t; });
    const auto rl = riemann_liouville_left(f2, FracOrder(0.5));
    const double exact = 1.0 / std::tgamma(0.5) + 2.0 / std::tgamma(2.5);
    s.at_most("Riemann-Liouville^0.5 (1+t^2) at t=1", std::abs(rl.back() - exact), 1e-3);
    const auto r3 = SampleSeries::sample(g, [](double t) { return -3.0 * (1 - t) * (1 - t); });
    const auto cr = caputo_right(r3, FracOrder(0.5));
    const double c = 6.0 / std::tgamma(3.5);
    s.at_most("right Caputo^0.5 (1-t)^3",
              sup_distance(cr, [c](double t) { return c * std::pow(1 - t, 2.5); }, 0.0, 1.0), 1e-5);
  }
}

void mittag_leffler(std::vector<CheckRow>& rows) {
  Suite s("mittag-leffler", rows);
  s.at_most("E_{1,1}(z) = e^z, z in [-5,5]",
            max_over(-5, 5, 0.01, [](double z) { return std::abs(ml({1, 1}, z) - std::exp(z)); }), 1e-10);
  s.at_most("E_{2,1}(-t^2) = cos t, t in [0,10]",
            max_over(0, 10, 0.01, [](double t) { return std::abs(ml({2, 1}, -t * t) - std::cos(t)); }),
            1e-10);
  s.at_most("E_{1,2}(z) = (e^z-1)/z, z in [-5,5]\\{0}",
            max_over(-5, 5, 0.01, [](double z) {
              return std::abs(z) < 1e-12 ? 0.0 : std::abs(ml({1, 2}, z) - std::expm1(z) / z);
            }),
            1e-10);
  double e0 = 0.0;
  for (double a : {0.3, 0.5, 1.5, 2.5})
    for (double b : {0.5, 1.0, 2.0, 3.5}) e0 = std::max(e0, std::abs(ml({a, b}, 0.0) - 1.0 / std::tgamma(b)));
  s.at_most("E_{a,b}(0) = 1/Gamma(b)", e0, 1e-10);
  s.at_most("E_{1/2,1}(-x) = exp(x^2) erfc(x), x in [0,5]",
            max_over(0, 5, 0.01, [](double x) {
              return std::abs(ml({0.5, 1}, -x) - std::exp(x * x) * std::erfc(x));
            }),
            1e-10);

  double dec = 0.0, gb = 0.0;
  for (double a : {1.25, 1.5, 1.75})
    for (double t : {0.5, 1.0, 2.0, 5.0, 10.0}) {
      dec = std::max(dec, std::abs(ml({a, 1}, -std::pow(t, a)) - (ml_decomp_f(a, 0, t) + ml_decomp_g(a, 0, t))));
      gb = std::max(gb, std::abs(ml_decomp_g(a, 0, t)) / ((2.0 / a) * std::exp(t * std::cos(M_PI / a))));
    }
  s.at_most("E_a(-t^a) = f_{a,0} + g_{a,0}", dec, 1e-6);
  s.at_most("|g_{a,0}| / ((2/a) e^{t cos(pi/a)})", gb, 1.0);
  for (double a : {1.25, 1.5, 1.75}) {
    std::vector<double> lx, ly;
    for (int i = 0; i <= 20; ++i) {
      const double t = 50.0 * std::pow(10.0, i / 20.0);
      lx.push_back(std::log(t));
      ly.push_back(std::log(std::abs(ml({a, 1}, -std::pow(t, a)))));
    }
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sx += lx[i];
      sy += ly[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * ly[i];
    }
    char name[64];
    std::snprintf(name, sizeof name, "tail slope + alpha, alpha=%.2f", a);
    s.at_most(name, std::abs((n * sxy - sx * sy) / (n * sxx - sx * sx) + a), 0.05);
  }
  s.at_most("f_{1.5,0}(100) = -2.8209e-4 (relative)",
            std::abs(ml_decomp_f(1.5, 0, 100.0) / -2.8209e-4 - 1.0), 1e-3);
}

void oscillator(std::vector<CheckRow>& rows) {
  Suite s("oscillator", rows);
  const Grid g = Grid::with_step(0.0, 10.0, 0.05);
  const auto spec = OscillatorSpec::from_initial_data(2.5, 1.0, 1.0, 0.0);
  s.at_most("decomposed vs Mittag-Leffler form", sup_distance(decomposed_solution(spec, g), exact_solution(spec, g), 0, 10),
            1e-10);
  {
    const double b = 1.5, p = 1.5;
    const auto osc = OscillatorSpec::from_initial_data(2.5, 2.0, 1.0, 0.5);
    const auto conv = forcing_convolution(osc, g);
    auto closed = [&](double t) {
      const double z = -osc.omega2 * std::pow(t, b);
      return osc.q0 * std::pow(t, b + p) * ml({b, b + p + 1}, z) + osc.c1 * std::pow(t, b + 1) * ml({b, b + 2}, z) +
             osc.c2 * std::pow(t, b) * ml({b, b + 1}, z);
    };
    s.at_most("forcing convolution vs closed form", sup_distance(conv, closed, 0, 10), 1e-6);
  }
  s.at_most("ABM vs exact oscillator, h=1/256", convergence_error("oscillator-abm", 1.0 / 256), 1e-4);
  {
    IntegratorConfig cfg{1.0 / 4096, 5.0, Scheme::kAbmFractional, {}, 1e12};
    const double init[] = {1.0};
    const auto r = integrate_fractional_abm(0.5, [](double, double x) { return -x; }, init, cfg);
    s.at_most("ABM D^0.5 x = -x vs E_{0.5}(-t^0.5)",
              sup_distance(r.position(0), [](double t) { return ml({0.5, 1}, -std::sqrt(t)); }, 0, 5), 1e-4);
  }
  {
    const auto lim = OscillatorSpec::homogeneous(3.0 - 1e-9, 1.0, 0.0, 1.0);
    s.at_most("alpha -> 3 limit is sin t",
              sup_distance(exact_solution(lim, g), [](double t) { return std::sin(t); }, 0, 10), 1e-6);
  }
  s.at_least("ABM oscillator ladder order",
             ladder_order([](double h) { return convergence_error("oscillator-abm", h); },
                          {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128}),
             0.75);
}

SystemSpec scenario_system(int which, double alpha) {
  SystemSpec s;
  if (which == 2) {
    s.n = 2;
    s.potential = Potential::quadratic(VectorXd::Ones(2));
    s.constraint = LinearConstraint{VectorXd::Ones(2), (VectorXd(2) << 0.0, 0.5).finished(), FracOrder(alpha)};
    s.q_init = (VectorXd(2) << 1.0, 0.2).finished();
  } else {
    const int n = which == 0 ? 2 : 3;
    s.n = static_cast<std::size_t>(n);
    VectorXd k(n), a(n), b(n);
    for (int i = 0; i < n; ++i) {
      k[i] = 1.0 + i;
      a[i] = 1.0 / (1 + i);
      b[i] = 0.3 - 0.1 * i;
    }
    s.potential = Potential::quadratic(k);
    s.constraint = LinearConstraint{a, b, FracOrder(alpha)};
    s.q_init = VectorXd::LinSpaced(n, 1.0, 0.5);
  }
  s.qdot_init = VectorXd::Zero(static_cast<Eigen::Index>(s.n));
  return s;
}

double sup_q(const SimulationResult& coarse, const SimulationResult& fine) {
  const auto stride = static_cast<std::size_t>(std::llround(coarse.h / fine.h));
  double e = 0.0;
  for (std::size_t j = 0; j < coarse.q.size(); ++j)
    e = std::max(e, (coarse.q[j] - fine.q[j * stride]).cwiseAbs().maxCoeff());
  return e;
}

void constraints(std::vector<CheckRow>& rows) {
  Suite s("constraints", rows);
  {
    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> nd;
    double e = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      VectorXd a(3);
      for (int i = 0; i < 3; ++i) a[i] = nd(rng);
      const Eigen::MatrixXd P = projector(a);
      e = std::max({e, (P * P - P).cwiseAbs().maxCoeff(), (P * a).cwiseAbs().maxCoeff(),
                    (P - P.transpose()).cwiseAbs().maxCoeff()});
    }
    s.at_most("projector P^2 = P, P a = 0, P = P^T", e, 1e-12);
  }
  {
    SystemSpec sys;
    sys.n = 1;
    sys.potential = {[](const VectorXd& q) { return q[0]; }, [](const VectorXd& q) { return VectorXd::Ones(q.size()).eval(); }};
    GeneralConstraint c;
    c.f = [](const ConstraintPoint& x) { return x.qdot[0]; };
    c.d_qdot = [](const ConstraintPoint&) { return VectorXd::Ones(1).eval(); };
    sys.constraint = c;
    sys.q_init = VectorXd::Zero(1);
    sys.qdot_init = VectorXd::Zero(1);
    const ConstraintPoint x{VectorXd::Constant(1, 0.3), VectorXd::Zero(1), VectorXd::Zero(1), VectorXd::Zero(1)};
    s.at_most("multiplier for f = q', u = q", std::abs(lambda_general(sys, x, {VectorXd::Zero(1), {}}) - 1.0), 1e-15);
  }
  const double h = 1e-3;
  {
    SystemSpec sys;
    sys.n = 2;
    sys.potential = Potential::quadratic(VectorXd::Ones(2));
    sys.constraint = LinearConstraint{(VectorXd(2) << 1, 0).finished(), VectorXd::Zero(2), FracOrder(0.5)};
    sys.q_init = (VectorXd(2) << 0, 1).finished();
    sys.qdot_init = VectorXd::Zero(2);
    const IntegratorConfig cfg{h, 10.0, Scheme::kVelocityVerlet, {}, 1e12};
    const auto L = simulate(sys, cfg);
    const auto L2 = simulate(sys, IntegratorConfig{h / 2, 10.0, Scheme::kVelocityVerlet, {}, 1e12});
    s.at_most("b = 0: q_2 = cos t", sup_distance(L.position(1), [](double t) { return std::cos(t); }, 0, 10), 1e-4);
    const auto H = integrate_hamilton(
        HamiltonSpec::constant(sys.constraint ? std::get<LinearConstraint>(*sys.constraint).a : VectorXd(),
                               sys.potential, FracOrder(0.5), sys.q_init, VectorXd::Zero(2)),
        cfg);
    const double tol = sup_q(L, L2);
    double d = 0.0;
    for (std::size_t j = 0; j < L.q.size(); ++j) d = std::max(d, (L.q[j] - H.q[j]).cwiseAbs().maxCoeff());
    s.at_most("Hamilton vs Lagrange (/ solver tolerance)", d / tol, 5.0);

    SystemSpec free = sys;
    free.constraint.reset();
    free.qdot_init = (VectorXd(2) << 0.5, 0).finished();
    const auto F = simulate(free, cfg);
    double drift = 0.0;
    auto energy = [&](std::size_t j) { return 0.5 * F.qdot[j].squaredNorm() + free.potential.value(F.q[j]); };
    for (std::size_t j = 0; j < F.q.size(); ++j) drift = std::max(drift, std::abs(energy(j) - energy(0)));
    s.at_most("unconstrained energy drift, T=10", drift, 1e-6);
  }

  const char* names[] = {"linear-nd n=2", "linear-nd n=3", "case2-2d"};
  for (int which = 0; which < 3; ++which) {
    const SystemSpec sys = scenario_system(which, 0.5);
    const auto r1 = simulate(sys, IntegratorConfig{1e-2, 10.0, Scheme::kVelocityVerlet, {}, 1e12});
    const auto r2 = simulate(sys, IntegratorConfig{5e-3, 10.0, Scheme::kVelocityVerlet, {}, 1e12});
    s.at_least(std::string("constraint residual two-grid ratio, ") + names[which],
               r1.max_abs_residual() / r2.max_abs_residual(), std::pow(2.0, 0.75));
  }
  {
    const SystemSpec sys = scenario_system(0, 0.5);
    auto run = [&](D1DalphaMode m, double hh) {
      ConstrainedOptions o;
      o.mode = m;
      return simulate(sys, IntegratorConfig{hh, 10.0, Scheme::kVelocityVerlet, {}, 1e12}, o);
    };
    const auto d1 = run(D1DalphaMode::kDirect, 1e-2), d2 = run(D1DalphaMode::kDirect, 5e-3);
    const auto s1 = run(D1DalphaMode::kShifted, 1e-2);
    s.at_most("direct vs shifted D^1 D^alpha (/ solver tolerance)", sup_q(d1, s1) / sup_q(d1, d2), 5.0);
  }
  {
    const double chain = convergence_error("oscillator-1d", 1.0 / 2048);
    s.at_most("1D constraint vs oscillator of order 2.5, h=1/2048", chain, 1e-2);
  }
  {
    auto run = [](NonlinearFracOscillator::Form f, double hh) {
      NonlinearFracOscillator sys(1.0, [](double x) { return x; }, FracOrder(1.5), f);
      return integrate_second_order(sys, VectorXd::Ones(1), VectorXd::Zero(1),
                                    IntegratorConfig{hh, 5.0, Scheme::kVelocityVerlet, {}, 1e12});
    };
    const auto r1 = run(NonlinearFracOscillator::Form::kReduced, 1e-3);
    const auto r2 = run(NonlinearFracOscillator::Form::kReduced, 5e-4);
    const auto p1 = run(NonlinearFracOscillator::Form::kPreReduction, 1e-3);
    const auto p2 = run(NonlinearFracOscillator::Form::kPreReduction, 5e-4);
    const double tol = std::max(sup_q(r1, r2), sup_q(p1, p2));
    s.at_most("pre-reduction vs reduced oscillator (/ solver tolerance)", sup_q(r1, p2) / tol, 5.0);
  }
}

}  // namespace

VerifyReport run_verify(const std::string& suite) {
  const auto& all = verify_suites();
  if (std::find(all.begin(), all.end(), suite) == all.end())
    throw DomainError("unknown verify suite '" + suite + "'");
  const auto t0 = std::chrono::steady_clock::now();
  VerifyReport rep;
  if (suite == "operators" || suite == "all") operators(rep.rows);
  if (suite == "mittag-leffler" || suite == "all") mittag_leffler(rep.rows);
  if (suite == "oscillator" || suite == "all") oscillator(rep.rows);
  if (suite == "constraints" || suite == "all") constraints(rep.rows);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

void print_report(const VerifyReport& report, std::ostream& os, bool quiet) {
  std::size_t failed = 0;
  char line[256];
  if (!quiet) {
    std::snprintf(line, sizeof line, "   %-15s %-58s %12s %12s  %s\n", "suite", "check", "measured",
                  "tolerance", "result");
    os << line;
  }
  for (const auto& r : report.rows) {
    if (!r.passed) ++failed;
    if (quiet && r.passed) continue;
    std::snprintf(line, sizeof line, "%s %-15s %-58s %12.4e %s%11.4e  %s\n", r.passed ? "  " : ">>",
                  r.suite.c_str(), r.name.c_str(), r.measured, r.at_least ? ">=" : "<=", r.tolerance,
                  r.passed ? "PASS" : "FAIL");
    os << line;
  }
  std::snprintf(line, sizeof line, "%zu checks, %zu failed, %.1f s\n", report.rows.size(), failed,
                report.wall_seconds);
  os << line;
}

}  // namespace fracdyn
