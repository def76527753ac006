// One pass/fail line per acceptance criterion. Exit status 1 when any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fracdyn/constrained_dynamics.hpp"
#include "fracdyn/frac_ops.hpp"
#include "fracdyn/mittag_leffler.hpp"
#include "fracdyn/oscillator_exact.hpp"
#include "fracdyn/scenario.hpp"
#include "fracdyn/verify.hpp"

using namespace fracdyn;
using Eigen::VectorXd;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& measured) {
  std::printf("criterion %2d: %s  %s [%s]\n", id, ok ? "PASS" : "FAIL", what.c_str(), measured.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
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

double sup_strided(const SimulationResult& coarse, const SimulationResult& fine) {
  const auto stride = static_cast<std::size_t>(std::llround(coarse.h / fine.h));
  double e = 0.0;
  for (std::size_t j = 0; j < coarse.q.size(); ++j)
    e = std::max(e, (coarse.q[j] - fine.q[j * stride]).cwiseAbs().maxCoeff());
  return e;
}

void c1() {
  double e = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double z = -5.0 + 0.01 * i;
    e = std::max(e, std::abs(ml({1, 1}, z) - std::exp(z)));
    if (i != 500) e = std::max(e, std::abs(ml({1, 2}, z) - std::expm1(z) / z));
    const double t = 0.01 * i;
    e = std::max(e, std::abs(ml({2, 1}, -t * t) - std::cos(t)));
  }
  report(1, e < 1e-10, "Mittag-Leffler identities e^z, cos t, (e^z-1)/z", fmt("max err %.2e", e));
}

void c2() {
  double e = 0.0;
  for (double a : {1.25, 1.5, 1.75})
    for (double t : {0.5, 1.0, 2.0, 5.0, 10.0})
      e = std::max(e, std::abs(ml({a, 1}, -std::pow(t, a)) - ml_decomp_f(a, 0, t) - ml_decomp_g(a, 0, t)));
  report(2, e < 1e-6, "decomposition E_a(-t^a) = f_{a,0} + g_{a,0}", fmt("max err %.2e", e));
}

void c3() {
  double worst_slope = 0.0, worst_bound = 0.0;
  for (double a : {1.25, 1.5, 1.75}) {
    std::vector<double> x, y;
    for (int i = 0; i <= 40; ++i) {
      const double t = 50.0 * std::pow(10.0, i / 40.0);
      x.push_back(std::log(t));
      y.push_back(std::log(std::abs(ml({a, 1}, -std::pow(t, a)))));
    }
    worst_slope = std::max(worst_slope, std::abs(slope(x, y) + a));
    for (double t = 0.0; t <= 20.0; t += 0.1)
      worst_bound = std::max(worst_bound, std::abs(ml_decomp_g(a, 0, t)) / ((2.0 / a) * std::exp(t * std::cos(M_PI / a))));
  }
  report(3, worst_slope <= 0.05 && worst_bound <= 1.0, "tail slope -alpha on [50,500], g envelope",
         fmt("|slope+alpha| %.2e, max |g|/envelope %.4f", worst_slope, worst_bound));
}

void c4() {
  const std::vector<double> ladder = {1.0 / 256, 1.0 / 512, 1.0 / 1024, 1.0 / 2048, 1.0 / 4096};
  const double pt = convergence_study("caputo-pt", ladder).fitted_order();
  const double l1 = convergence_study("caputo-l1", ladder).fitted_order();
  report(4, pt >= 1.8 && l1 >= 2.0 - 0.5 - 0.1, "Caputo power rule orders (product-trapezoid, L1 at alpha 0.5)",
         fmt("orders %.3f, %.3f", pt, l1));
}

void c5() {
  bool ok = true;
  std::string m;
  for (double alpha : {0.5, 1.5}) {
    const FracOrder ord(alpha);
    const int mm = ord.m();
    auto d = [](int k, double t) { return k == 1 ? 3 * t * t : (k == 2 ? 6 * t : 6.0); };
    double prev = INFINITY, last = 0.0;
    bool mono = true;
    for (int n : {256, 512, 1024, 2048, 4096}) {
      const Grid g(0.0, 1.0, static_cast<std::size_t>(n));
      const auto fm = SampleSeries::sample(g, [&](double t) { return d(mm, t); });
      const auto fm1 = SampleSeries::sample(g, [&](double t) { return d(mm + 1, t); });
      const double lhs = differentiate(caputo_left(fm, ord)).back();
      const double rhs = caputo_left(fm1, ord).back() + prop1_shift(ord, d(mm, 0.0), 1.0);
      last = std::abs(lhs - rhs);
      mono = mono && last < prev;
      prev = last;
    }
    ok = ok && mono && last < 1e-2;
    m += fmt("alpha %.1f: %.2e, ", alpha, last) + (mono ? "monotone" : "NOT monotone") + "; ";
  }
  report(5, ok, "derivative shift identity for t^3 at t = 1, h -> 1/4096", m);
}

void c6() {
  const double e1 = convergence_error("oscillator-1d", 1.0 / 1024);
  const double e2 = convergence_error("oscillator-1d", 1.0 / 2048);
  report(6, e2 < 1e-2 && e1 / e2 >= 1.7, "1D linear constraint trajectory vs order-2.5 oscillator",
         fmt("sup err %.3e at h=1/2048, ratio %.3f", e2, e1 / e2));
}

void c7() {
  auto nd3 = default_config("linear-nd");
  nd3.a = {1.0, 0.5, 0.25};
  nd3.b = {0.3, 0.2, 0.1};
  nd3.potential.k = {1.0, 2.0, 3.0};
  nd3.q0 = {1.0, 0.75, 0.5};
  nd3.qdot0 = {0.0, 0.0, 0.0};
  const std::vector<std::pair<std::string, ScenarioConfig>> cases = {
      {"linear-nd n=2", default_config("linear-nd")}, {"linear-nd n=3", nd3}, {"case2-2d", default_config("case2-2d")}};
  const double need = std::pow(2.0, 0.75);
  bool ok = true;
  std::string m;
  for (auto [name, c] : cases) {
    c.h = 1e-2;
    const double r1 = run_scenario(c).result.max_abs_residual();
    c.h = 5e-3;
    const double r2 = run_scenario(c).result.max_abs_residual();
    ok = ok && r1 / r2 >= need;
    m += name + fmt(" %.2f; ", r1 / r2);
  }
  report(7, ok, "constraint residual two-grid ratio >= 2^0.75", m);
}

void c8() {
  SystemSpec s;
  s.n = 2;
  s.potential = Potential::quadratic(VectorXd::Ones(2));
  s.constraint = LinearConstraint{(VectorXd(2) << 1, 0).finished(), VectorXd::Zero(2), FracOrder(0.5)};
  s.q_init = (VectorXd(2) << 0, 1).finished();
  s.qdot_init = VectorXd::Zero(2);
  const IntegratorConfig cfg{1e-3, 10.0, Scheme::kVelocityVerlet, {}};
  const auto L = simulate(s, cfg);
  const auto L2 = simulate(s, {5e-4, 10.0, Scheme::kVelocityVerlet, {}});
  const double cos_err = sup_distance(L.position(1), [](double t) { return std::cos(t); }, 0, 10);
  const auto H = integrate_hamilton(
      HamiltonSpec::constant((VectorXd(2) << 1, 0).finished(), s.potential, FracOrder(0.5), s.q_init, VectorXd::Zero(2)), cfg);
  double hl = 0.0;
  for (std::size_t j = 0; j < L.q.size(); ++j) hl = std::max(hl, (L.q[j] - H.q[j]).cwiseAbs().maxCoeff());
  const double tol = sup_strided(L, L2);

  SystemSpec free = s;
  free.constraint.reset();
  free.qdot_init = (VectorXd(2) << 0.5, 0).finished();
  const auto F = simulate(free, cfg);
  auto energy = [&](std::size_t j) { return 0.5 * F.qdot[j].squaredNorm() + free.potential.value(F.q[j]); };
  double drift = 0.0;
  for (std::size_t j = 0; j < F.q.size(); ++j) drift = std::max(drift, std::abs(energy(j) - energy(0)));
  report(8, cos_err < 1e-4 && hl <= 5 * tol && drift < 1e-6, "classical limits: b = 0, Hamilton = Lagrange, energy",
         fmt("cos err %.2e, |H-L| %.2e vs 5x tol %.2e", cos_err, hl, 5 * tol) + fmt(", drift %.2e", drift));
}

void c9() {
  auto run = [](NonlinearFracOscillator::Form f, double h) {
    NonlinearFracOscillator sys(1.0, [](double x) { return x; }, FracOrder(1.5), f);
    return integrate_second_order(sys, VectorXd::Ones(1), VectorXd::Zero(1), {h, 5.0, Scheme::kVelocityVerlet, {}});
  };
  const auto r1 = run(NonlinearFracOscillator::Form::kReduced, 1e-3);
  const auto r2 = run(NonlinearFracOscillator::Form::kReduced, 5e-4);
  const auto p1 = run(NonlinearFracOscillator::Form::kPreReduction, 1e-3);
  const auto p2 = run(NonlinearFracOscillator::Form::kPreReduction, 5e-4);
  const double tol = std::max(sup_strided(r1, r2), sup_strided(p1, p2));
  const double gap = sup_strided(r1, p2);
  report(9, gap <= 5 * tol, "pre-reduction vs reduced nonlinear oscillator on [0,5]",
         fmt("gap %.3e vs 5x tol %.3e", gap, 5 * tol));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void c10(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / "fracdyn_acceptance";
  fs::remove_all(root);
  bool same = true;
  std::string bad;
  for (const auto& id : scenario_ids()) {
    for (const char* run : {"a", "b"}) {
      const std::string cmd = cli + " run --scenario " + id + " --quiet --out " + (root / run).string();
      if (std::system(cmd.c_str()) != 0) {
        same = false;
        bad += id + "(exit) ";
      }
    }
    for (const char* kind : {"_trajectory.csv", "_comparison.csv"}) {
      const auto a = root / "a" / (id + kind), b = root / "b" / (id + kind);
      if (fs::exists(a) != fs::exists(b) || (fs::exists(a) && slurp(a) != slurp(b))) {
        same = false;
        bad += id + kind + " ";
      }
    }
  }
  fs::remove_all(root);
  const auto rep = run_verify("all");
  report(10, same && rep.wall_seconds < 600.0, "byte-identical CSVs for every scenario, verify all < 600 s",
         (same ? std::string("identical") : "differs: " + bad) + fmt(", verify all %.1f s", rep.wall_seconds));
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "fracdyn";
  c1();
  c2();
  c3();
  c4();
  c5();
  c6();
  c7();
  c8();
  c9();
  c10(cli);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
