#include <doctest.h>

#include <cmath>
#include <vector>

#include "fracdyn/errors.hpp"
#include "fracdyn/frac_ops.hpp"
#include "fracdyn/kernels.hpp"
#include "mpfr_oracle.hpp"

using namespace fracdyn;

namespace {

double rule(double p, double alpha) { return oracle::gamma_mp(p + 1) / oracle::gamma_mp(p + 1 - alpha); }

double fitted(const std::vector<double>& hs, const std::vector<double>& es) {
  return std::log(es.front() / es.back()) / std::log(hs.front() / hs.back());
}

}  // namespace

TEST_CASE("fractional integral power rule and second-order convergence") {
  std::vector<double> hs, es;
  for (int n : {64, 128, 256, 512}) {
    const Grid g(0.0, 1.0, static_cast<std::size_t>(n));
    const auto f = SampleSeries::sample(g, [](double t) { return t * t; });
    const auto J = fractional_integral(f, 0.5);
    const double c = rule(2.0, -0.5);
    hs.push_back(1.0 / n);
    es.push_back(sup_distance(J, [c](double t) { return c * std::pow(t, 2.5); }, 0, 1));
  }
  CHECK(es.back() < 1e-5);
  CHECK(fitted(hs, es) > 1.9);
}

TEST_CASE("right fractional integral mirrors the left one") {
  const Grid g(0.0, 1.0, 512);
  const auto f = SampleSeries::sample(g, [](double t) { return (1 - t) * (1 - t); });
  const auto J = fractional_integral_right(f, 0.3);
  const double c = rule(2.0, -0.3);
  CHECK(sup_distance(J, [c](double t) { return c * std::pow(1 - t, 2.3); }, 0, 1) < 1e-5);
}

TEST_CASE("Caputo power rule for 0 < alpha < 1 and 1 < alpha < 2") {
  const Grid g(0.0, 2.0, 2048);
  for (double alpha : {0.3, 0.5, 0.8}) {
    const auto f1 = SampleSeries::sample(g, [](double t) { return 3 * t * t; });
    const double c = rule(3.0, alpha);
    CHECK(sup_distance(caputo_left(f1, FracOrder(alpha)), [&](double t) { return c * std::pow(t, 3 - alpha); }, 0, 2) <
          1e-5);
  }
  for (double alpha : {1.2, 1.5, 1.8}) {
    const auto f2 = SampleSeries::sample(g, [](double t) { return 6 * t; });
    const double c = rule(3.0, alpha);
    CHECK(sup_distance(caputo_left(f2, FracOrder(alpha)), [&](double t) { return c * std::pow(t, 3 - alpha); }, 0, 2) <
          1e-5);
  }
}

TEST_CASE("Caputo from samples differentiates first") {
  const Grid g(0.0, 1.0, 2048);
  const auto f = SampleSeries::sample(g, [](double t) { return t * t * t; });
  const double c = rule(3.0, 0.5);
  CHECK(sup_distance(caputo_left_from_samples(f, FracOrder(0.5)), [&](double t) { return c * std::pow(t, 2.5); }, 0.05,
                     1) < 1e-4);
}

TEST_CASE("causal L1 history at order 2 - alpha") {
  for (double alpha : {0.3, 0.5, 0.7}) {
    std::vector<double> hs, es;
    for (int n : {256, 512, 1024, 2048}) {
      const Grid g(0.0, 1.0, static_cast<std::size_t>(n));
      const auto q = SampleSeries::sample(g, [](double t) { return t * t; });
      hs.push_back(1.0 / n);
      es.push_back(std::abs(caputo_left_history(q, FracOrder(alpha)) - rule(2.0, alpha)));
    }
    CAPTURE(alpha);
    CHECK(fitted(hs, es) > 2.0 - alpha - 0.1);
  }
}

TEST_CASE("L1 history for 1 < alpha < 2 uses the initial slope") {
  const Grid g(0.0, 1.0, 2048);
  const auto q = SampleSeries::sample(g, [](double t) { return t * t * t + t; });
  const double got = caputo_left_history(q, FracOrder(1.5), 1.0);
  CHECK(got == doctest::Approx(rule(3.0, 1.5)).epsilon(1e-3));
}

TEST_CASE("CaputoHistory newest weight is the derivative in the newest sample") {
  for (double alpha : {0.5, 1.5}) {
    const double h = 0.01;
    CaputoHistory hist(FracOrder(alpha), h);
    std::vector<double> x(20);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.3 * static_cast<double>(i));
    const std::size_t j = x.size() - 1;
    const double base = hist.evaluate(x, j, 0.3 / h);
    x[j] += 1e-6;
    CaputoHistory hist2(FracOrder(alpha), h);
    const double bumped = hist2.evaluate(x, j, 0.3 / h);
    CHECK((bumped - base) / 1e-6 == doctest::Approx(hist.newest_weight(j)).epsilon(1e-6));
  }
}

TEST_CASE("memory window truncation approximates full memory") {
  const Grid g(0.0, 1.0, 1024);
  const auto q = SampleSeries::sample(g, [](double t) { return t * t; });
  CaputoHistory full(FracOrder(0.5), g.step());
  CaputoHistory windowed(FracOrder(0.5), g.step(), 512);
  const double a = full.evaluate(q.values(), 1024);
  const double b = windowed.evaluate(q.values(), 1024);
  CHECK(a != b);
  CHECK(std::abs(a - b) < 0.3 * std::abs(a));
  CHECK_THROWS_AS(CaputoHistory(FracOrder(0.5), 0.1, 5), DomainError);
}

TEST_CASE("Riemann-Liouville differs from Caputo by the initial-value term") {
  const Grid g(0.0, 1.0, 2048);
  const auto f = SampleSeries::sample(g, [](double t) { return 2.0 + t * t; });
  const auto rl = riemann_liouville_left(f, FracOrder(0.5));
  const double c = rule(2.0, 0.5);
  auto exact = [&](double t) { return 2.0 * std::pow(t, -0.5) / oracle::gamma_mp(0.5) + c * std::pow(t, 1.5); };
  CHECK(sup_distance(rl, exact, 0.1, 1.0) < 1e-4);
}

TEST_CASE("right Caputo carries the (-1)^m sign") {
  const Grid g(0.0, 1.0, 2048);
  const auto d1 = SampleSeries::sample(g, [](double t) { return -3.0 * (1 - t) * (1 - t); });
  const double c = rule(3.0, 0.5);
  CHECK(sup_distance(caputo_right(d1, FracOrder(0.5)), [&](double t) { return c * std::pow(1 - t, 2.5); }, 0, 1) < 1e-5);
}

TEST_CASE("derivative shift closed form") {
  // d/dt J^{m-a} f^(m) = J^{m-a} f^(m+1) + f^(m)(a) (t-a)^{m-a-1} / Gamma(m-a)
  for (double alpha : {0.5, 1.5}) {
    const FracOrder o(alpha);
    const double t = 0.7, a = 0.2, fm = 1.3;
    CHECK(prop1_shift(o, fm, t, a) ==
          doctest::Approx(fm * std::pow(t - a, o.m() - alpha - 1) / oracle::gamma_mp(o.m() - alpha)));
    const double avg = prop1_shift_average(o, fm, t, t + 0.01, a);
    double quad = 0.0;
    for (int i = 0; i < 1000; ++i) quad += prop1_shift(o, fm, t + (i + 0.5) * 1e-5, a) / 1000.0;
    CHECK(avg == doctest::Approx(quad).epsilon(1e-6));
  }
  CHECK_THROWS_AS(prop1_shift(FracOrder(0.5), 1.0, 0.0), DomainError);
}

TEST_CASE("commutation defect is the f(a) boundary term") {
  const Grid g(0.0, 1.0, 2048);
  const auto f = SampleSeries::sample(g, [](double t) { return 1.0 + t; });
  const auto d = commutation_defect(f, 0.5, 1.0);
  CHECK(d.mismatch(0.1) < 1e-3);
  CHECK(std::abs(d.analytic[1024] - std::pow(0.5, -0.5) / oracle::gamma_mp(0.5)) < 1e-12);
}

TEST_CASE("operators reject integer and out-of-range orders") {
  const Grid g(0.0, 1.0, 16);
  const auto f = SampleSeries::zeros(g);
  CHECK_THROWS_AS(caputo_left(f, FracOrder(1.0)), UnsupportedOrderError);
  CHECK_THROWS_AS(fractional_integral(f, 1.5), DomainError);
  CHECK_THROWS_AS(fractional_integral(f, 0.0), DomainError);
  CHECK_THROWS_AS(FracOrder(-0.5), DomainError);
  CHECK_THROWS_AS(caputo_left_history(f, FracOrder(2.5)), UnsupportedOrderError);
}

TEST_CASE("parallel kernels are bit-identical to the serial reference") {
  std::vector<double> x(3000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::cos(0.01 * static_cast<double>(i)) + 1e-3 * static_cast<double>(i);
  std::vector<double> a(x.size()), b(x.size());
  kernels::fractional_integral(x, 0.4, 1e-3, a, kernels::Exec::kSerial);
  kernels::fractional_integral(x, 0.4, 1e-3, b, kernels::Exec::kParallel);
  CHECK(a == b);
  kernels::l1_caputo(x, 0.6, 1e-3, a, kernels::Exec::kSerial);
  kernels::l1_caputo(x, 0.6, 1e-3, b, kernels::Exec::kParallel);
  CHECK(a == b);
  std::vector<double> lo(x.size(), 0.25), up(x.size(), 0.5);
  kernels::weighted_convolution(x, x, lo, up, a, kernels::Exec::kSerial);
  kernels::weighted_convolution(x, x, lo, up, b, kernels::Exec::kParallel);
  CHECK(a == b);
}
