#include <doctest.h>

#include <cmath>
#include <complex>

#include "fracdyn/errors.hpp"
#include "fracdyn/frac_ops.hpp"
#include "fracdyn/mittag_leffler.hpp"
#include "fracdyn/oscillator_exact.hpp"
#include "talbot.hpp"

using namespace fracdyn;
using cplx = std::complex<double>;

namespace {

// Laplace transform of the closed-form trajectory, built from
// L[t^{b-1} E_{a,b}(-w t^a)] = s^{a-b} / (s^a + w).
cplx transform(const OscillatorSpec& s, cplx z) {
  const double beta = s.alpha - 1.0;
  const double p = s.m() - s.alpha + 1.0;
  const cplx den = std::pow(z, beta) + s.omega2;
  const cplx homog = (s.q0 * std::pow(z, beta - 1.0) + s.qp0 * std::pow(z, beta - 2.0)) / den;
  cplx Q = s.c1 / (z * z) + s.c2 / z;
  if (s.forcing == OscillatorSpec::Forcing::kChain) Q += s.q0 / std::pow(z, p + 1.0);
  return homog + Q / den;
}

}  // namespace

TEST_CASE("forcing closed form") {
  auto s = OscillatorSpec::from_initial_data(2.5, 1.0, 1.0, 0.0);
  s.c1 = s.c2 = 0.0;
  CHECK(forcing(s, 1.0) == doctest::Approx(1.0 / std::tgamma(2.5)));
  s.q0 = 0.0;
  s.c1 = 2.0;
  s.c2 = 3.0;
  CHECK(forcing(s, 2.0) == doctest::Approx(7.0));
  CHECK_THROWS_AS(forcing(s, -1.0), DomainError);
}

TEST_CASE("exact solution matches numerical Laplace inversion") {
  const Grid g = Grid::with_step(0.0, 8.0, 0.125);
  for (double alpha : {2.3, 2.5, 2.8}) {
    for (auto spec : {OscillatorSpec::from_initial_data(alpha, 1.0, 1.0, 0.0),
                      OscillatorSpec::from_initial_data(alpha, 2.0, 0.5, 1.0),
                      OscillatorSpec::homogeneous(alpha, 1.5, 1.0, -0.5)}) {
      const auto q = exact_solution(spec, g);
      CHECK(q[0] == spec.q0);
      for (double t : {0.5, 1.0, 2.0, 5.0, 8.0}) {
        const auto j = static_cast<std::size_t>(std::llround(t / g.step()));
        const double ref = oracle::talbot([&](cplx z) { return transform(spec, z); }, t);
        CAPTURE(alpha);
        CAPTURE(t);
        CHECK(std::abs(q[j] - ref) < 1e-6);
      }
    }
  }
}

TEST_CASE("homogeneous solution is E_{a-1}(-w t^{a-1})") {
  const Grid g = Grid::with_step(0.0, 10.0, 0.1);
  const auto spec = OscillatorSpec::homogeneous(2.5, 1.0, 1.0, 0.0);
  CHECK(sup_distance(exact_solution(spec, g), [](double t) { return ml({1.5, 1}, -std::pow(t, 1.5)); }, 0, 10) < 1e-12);
}

TEST_CASE("classical limit reproduces sin and cos") {
  const Grid g = Grid::with_step(0.0, 10.0, 0.05);
  const auto s = OscillatorSpec::homogeneous(3.0 - 1e-9, 1.0, 0.0, 1.0);
  CHECK(sup_distance(exact_solution(s, g), [](double t) { return std::sin(t); }, 0, 10) < 1e-6);
  const auto c = OscillatorSpec::homogeneous(3.0 - 1e-9, 1.0, 1.0, 0.0);
  CHECK(sup_distance(exact_solution(c, g), [](double t) { return std::cos(t); }, 0, 10) < 1e-6);
}

TEST_CASE("decomposed solution agrees with the Mittag-Leffler form") {
  const Grid g = Grid::with_step(0.0, 10.0, 0.05);
  for (double alpha : {2.25, 2.5, 2.75}) {
    const auto s = OscillatorSpec::from_initial_data(alpha, 1.0, 1.0, 0.5);
    CHECK(sup_distance(decomposed_solution(s, g), exact_solution(s, g), 0.1, 10) < 1e-5);
  }
  const auto zero = OscillatorSpec::homogeneous(2.5, 1.0, 0.0, 0.0);
  CHECK(sup_distance(decomposed_solution(zero, g), [](double) { return 0.0; }, 0, 10) == 0.0);
}

TEST_CASE("exact solution satisfies the oscillator equation") {
  const double h = 1.0 / 2048;
  const Grid g = Grid::with_step(0.0, 10.0, h);
  const auto spec = OscillatorSpec::from_initial_data(2.5, 1.0, 1.0, 0.0);
  const auto q = exact_solution(spec, g);
  const auto d = caputo_left_from_samples(q, FracOrder(1.5));
  double worst = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double t = g.node(j);
    if (t < 0.5) continue;
    worst = std::max(worst, std::abs(d[j] + spec.omega2 * q[j] - forcing(spec, t)));
  }
  CHECK(worst < 1e-2);
}

TEST_CASE("serial and parallel evaluation agree bit for bit") {
  const Grid g = Grid::with_step(0.0, 4.0, 1.0 / 64);
  const auto spec = OscillatorSpec::from_initial_data(2.5, 1.0, 1.0, 0.3);
  const auto a = exact_solution(spec, g, kernels::Exec::kSerial);
  const auto b = exact_solution(spec, g, kernels::Exec::kParallel);
  for (std::size_t j = 0; j < g.size(); ++j) CHECK(a[j] == b[j]);
}

TEST_CASE("exact solution rejects orders outside (2,3)") {
  const Grid g(0.0, 1.0, 8);
  CHECK_THROWS_AS(exact_solution(OscillatorSpec::homogeneous(1.5, 1.0, 1.0, 0.0), g), DomainError);
  CHECK_THROWS_AS(exact_solution(OscillatorSpec::homogeneous(2.5, -1.0, 1.0, 0.0), g), DomainError);
  CHECK_THROWS_AS(exact_solution(OscillatorSpec::homogeneous(2.5, 1.0, 1.0, 0.0), Grid(1.0, 2.0, 8)), DomainError);
}
