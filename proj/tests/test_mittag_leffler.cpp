#include <doctest.h>

#include <cmath>
#include <vector>

#include "fracdyn/errors.hpp"
#include "fracdyn/mittag_leffler.hpp"
#include "mpfr_oracle.hpp"

using fracdyn::ml;

TEST_CASE("ml matches high-precision series on both evaluation branches") {
  for (double a : {0.3, 0.7, 1.3, 1.5, 1.8, 2.5}) {
    for (double b : {0.6, 1.0, 1.7, 2.5}) {
      const double z_lo = a < 0.6 ? -6.0 : -20.0;
      for (double z = z_lo; z <= 6.0; z += 0.73) {
        const double ref = oracle::ml_series_mp(a, b, z);
        const double got = ml({a, b}, z);
        CAPTURE(a);
        CAPTURE(b);
        CAPTURE(z);
        CHECK(std::abs(got - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
      }
    }
  }
}

TEST_CASE("ml elementary identities") {
  for (double z = -5.0; z <= 5.0; z += 0.05) {
    CHECK(std::abs(ml({1, 1}, z) - std::exp(z)) < 1e-10);
    if (std::abs(z) > 1e-12) CHECK(std::abs(ml({1, 2}, z) - std::expm1(z) / z) < 1e-10);
  }
  for (double t = 0.0; t <= 10.0; t += 0.05) CHECK(std::abs(ml({2, 1}, -t * t) - std::cos(t)) < 1e-10);
  for (double b : {0.5, 1.0, 2.0, 3.5}) CHECK(ml({0.8, b}, 0.0) == doctest::Approx(1.0 / oracle::gamma_mp(b)).epsilon(1e-14));
}

TEST_CASE("ml branch switch is continuous at the series radius") {
  for (double a : {0.5, 1.5, 1.9}) {
    const double lo = ml({a, 1}, -fracdyn::kMLSeriesRadius);
    const double hi = ml({a, 1}, -std::nextafter(fracdyn::kMLSeriesRadius, 10.0));
    CHECK(std::abs(lo - hi) < 1e-10);
  }
}

TEST_CASE("ml rejects invalid parameters") {
  CHECK_THROWS_AS(ml({0.0, 1.0}, 1.0), fracdyn::DomainError);
  CHECK_THROWS_AS(ml({1.0, -1.0}, 1.0), fracdyn::DomainError);
  CHECK_THROWS_AS(ml({1.0, 1.0}, NAN), fracdyn::DomainError);
}

TEST_CASE("decomposition f + g reproduces E_a(-t^a)") {
  for (double a : {1.25, 1.5, 1.75})
    for (double t : {0.5, 1.0, 2.0, 5.0, 10.0}) {
      const double ref = oracle::ml_series_mp(a, 1.0, -std::pow(t, a));
      CHECK(std::abs(fracdyn::ml_decomp_f(a, 0, t) + fracdyn::ml_decomp_g(a, 0, t) - ref) < 1e-6);
    }
}

TEST_CASE("decomposition with k = 1 reproduces t E_{a,2}(-t^a)") {
  for (double a : {1.25, 1.5, 1.75})
    for (double t : {0.5, 2.0, 5.0}) {
      const double ref = t * oracle::ml_series_mp(a, 2.0, -std::pow(t, a));
      CHECK(std::abs(fracdyn::ml_decomp_f(a, 1, t) + fracdyn::ml_decomp_g(a, 1, t) - ref) < 1e-6);
    }
}

TEST_CASE("oscillating part is bounded by its exponential envelope") {
  for (double a : {1.25, 1.5, 1.75})
    for (double t = 0.0; t <= 20.0; t += 0.25)
      CHECK(std::abs(fracdyn::ml_decomp_g(a, 0, t)) <= (2.0 / a) * std::exp(t * std::cos(M_PI / a)) + 1e-15);
}

TEST_CASE("power-law tail") {
  // f_{a,0}(t) ~ t^{-a}/Gamma(1-a) at large t; Gamma(-0.5) < 0.
  const double f100 = fracdyn::ml_decomp_f(1.5, 0, 100.0);
  CHECK(f100 == doctest::Approx(-2.8209e-4).epsilon(1e-3));
  CHECK(f100 == doctest::Approx(std::pow(100.0, -1.5) / std::tgamma(-0.5)).epsilon(2e-2));
  for (double a : {1.25, 1.5, 1.75}) {
    const double t1 = 50.0, t2 = 500.0;
    const double s = (std::log(std::abs(ml({a, 1}, -std::pow(t2, a)))) -
                      std::log(std::abs(ml({a, 1}, -std::pow(t1, a))))) /
                     std::log(t2 / t1);
    CHECK(std::abs(s + a) < 0.05);
  }
  CHECK_THROWS_AS(fracdyn::ml_decomp_f(2.5, 0, 1.0), fracdyn::DomainError);
  CHECK_THROWS_AS(fracdyn::ml_decomp_f(1.5, 0, 0.0), fracdyn::DomainError);
}
