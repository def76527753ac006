#include "fracdyn/mittag_leffler.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "fracdyn/errors.hpp"
#include "fracdyn/grid.hpp"
#include "gauss_legendre.hpp"

namespace fracdyn {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
// successive panel-doubling estimates of f_{alpha,k} must agree to this
constexpr double kPanelTolerance = 1e-9;

void validate(MLParams p) {
  if (!(p.alpha > 0.0) || !(p.beta > 0.0) || !std::isfinite(p.alpha) || !std::isfinite(p.beta))
    throw DomainError("Mittag-Leffler: alpha and beta must be positive (alpha=" +
                      std::to_string(p.alpha) + ", beta=" + std::to_string(p.beta) + ")");
}

// ---------------------------------------------------------------------------
// Contour parameters. Region bounded by two singularities.
struct Contour {
  double mu = 0.0;
  double h = 0.0;
  double n = kInf;
};

Contour optimal_param_bounded(double t, double phi_j, double phi_j1, double p, double q,
                              double log_epsilon) {
  const double log_eps = std::log(DBL_EPSILON);
  const double fac = 1.01;
  const double f_max = std::exp(log_epsilon - log_eps);

  const double sq_phi_j = std::sqrt(phi_j);
  const double threshold = 2.0 * std::sqrt((log_epsilon - log_eps) / t);
  const double sq_phi_j1 = std::min(std::sqrt(phi_j1), threshold - sq_phi_j);

  double sq_phibar_j = 0.0, sq_phibar_j1 = 0.0, f_bar = 1.0;
  bool admissible = false;
  if (p < 1e-14 && q < 1e-14) {
    sq_phibar_j = sq_phi_j;
    sq_phibar_j1 = sq_phi_j1;
    admissible = true;
  } else if (p < 1e-14) {
    sq_phibar_j = sq_phi_j;
    const double f_min = sq_phi_j > 0.0 ? fac * std::pow(sq_phi_j / (sq_phi_j1 - sq_phi_j), q) : fac;
    if (f_min < f_max) {
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      const double fq = std::pow(f_bar, -1.0 / q);
      sq_phibar_j1 = (2.0 * sq_phi_j1 - fq * sq_phi_j) / (2.0 + fq);
      admissible = true;
    }
  } else if (q < 1e-14) {
    sq_phibar_j1 = sq_phi_j1;
    const double f_min = fac * std::pow(sq_phi_j1 / (sq_phi_j1 - sq_phi_j), p);
    if (f_min < f_max) {
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      const double fp = std::pow(f_bar, -1.0 / p);
      sq_phibar_j = (2.0 * sq_phi_j + fp * sq_phi_j1) / (2.0 - fp);
      admissible = true;
    }
  } else {
    double f_min =
        fac * (sq_phi_j + sq_phi_j1) / std::pow(sq_phi_j1 - sq_phi_j, std::max(p, q));
    if (f_min < f_max) {
      f_min = std::max(f_min, 1.5);
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      const double fp = std::pow(f_bar, -1.0 / p);
      const double fq = std::pow(f_bar, -1.0 / q);
      const double w = -phi_j1 * t / log_epsilon;
      const double den = 2.0 + w - (1.0 + w) * fp + fq;
      sq_phibar_j = ((2.0 + w + fq) * sq_phi_j + fp * sq_phi_j1) / den;
      sq_phibar_j1 = (-(1.0 + w) * fq * sq_phi_j + (2.0 + w - (1.0 + w) * fp) * sq_phi_j1) / den;
      admissible = true;
    }
  }
  if (!admissible) return {};

  const double log_eps_bar = log_epsilon - std::log(f_bar);
  const double w = -sq_phibar_j1 * sq_phibar_j1 * t / log_eps_bar;
  Contour c;
  c.mu = std::pow(((1.0 + w) * sq_phibar_j + sq_phibar_j1) / (2.0 + w), 2);
  c.h = -2.0 * kPi / log_eps_bar * (sq_phibar_j1 - sq_phibar_j) /
        ((1.0 + w) * sq_phibar_j + sq_phibar_j1);
  c.n = std::ceil(std::sqrt(1.0 - log_eps_bar / t / c.mu) / c.h);
  return c;
}

// Region to the right of the last singularity (unbounded).
Contour optimal_param_unbounded(double t, double phi_j, double p, double log_epsilon) {
  const double sq_phi_j = std::sqrt(phi_j);
  double phibar_j = phi_j > 0.0 ? phi_j * 1.01 : 0.01;
  double sq_phibar_j = std::sqrt(phibar_j);

  const double f_min = 1.0, f_max = 10.0, f_tar = 5.0;
  double n = 0.0, a = 0.0, sq_mu = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    const double phi_t = phibar_j * t;
    const double log_eps_phi_t = log_epsilon / phi_t;
    n = std::ceil(phi_t / kPi * (1.0 - 3.0 * log_eps_phi_t / 2.0 + std::sqrt(1.0 - 2.0 * log_eps_phi_t)));
    a = kPi * n / phi_t;
    sq_mu = sq_phibar_j * std::abs(4.0 - a) / std::abs(7.0 - std::sqrt(1.0 + 12.0 * a));
    const double fbar = std::pow((sq_phibar_j - sq_phi_j) / sq_mu, -p);
    if (p < 1e-14 || (f_min < fbar && fbar < f_max)) break;
    sq_phibar_j = std::pow(f_tar, -1.0 / p) * sq_mu + sq_phi_j;
    phibar_j = sq_phibar_j * sq_phibar_j;
  }
  Contour c;
  c.mu = sq_mu * sq_mu;
  c.n = n;
  c.h = (-3.0 * a - 2.0 + 2.0 * std::sqrt(1.0 + 12.0 * a)) / (4.0 - a) / n;

  // keep round-off under control
  const double log_eps = std::log(DBL_EPSILON);
  const double threshold = (log_epsilon - log_eps) / t;
  if (c.mu > threshold) {
    const double qq = std::abs(p) < 1e-14 ? 0.0 : std::pow(f_tar, -1.0 / p) * std::sqrt(c.mu);
    phibar_j = std::pow(qq + sq_phi_j, 2);
    if (phibar_j < threshold) {
      const double w = std::sqrt(log_eps / (log_eps - log_epsilon));
      const double u = std::sqrt(-phibar_j * t / log_eps);
      c.mu = threshold;
      c.n = std::ceil(w * log_epsilon / 2.0 / kPi / (u * w - 1.0));
      c.h = std::sqrt(log_eps / (log_eps - log_epsilon)) / c.n;
    } else {
      c.n = kInf;
      c.h = 0.0;
    }
  }
  return c;
}

void check_decomp_args(double alpha, int k, const char* op) {
  if (!(alpha > 1.0 && alpha < 2.0))
    throw DomainError(std::string(op) + ": alpha must lie in (1,2), got " + std::to_string(alpha));
  if (k != 0 && k != 1) throw DomainError(std::string(op) + ": k must be 0 or 1");
}

}  // namespace

double ml_series(MLParams p, double z, double* peak_term) {
  validate(p);
  if (z == 0.0) {
    if (peak_term) *peak_term = std::abs(rgamma(p.beta));
    return rgamma(p.beta);
  }
  const long double log_abs_z = std::log(std::abs(static_cast<long double>(z)));
  const bool negative = z < 0.0;
  // index beyond which terms decrease monotonically
  const double k_peak = std::pow(std::abs(z), 1.0 / p.alpha) / p.alpha + 2.0;
  long double sum = 0.0L;
  long double comp = 0.0L;  // Kahan compensation
  long double peak = 0.0L;
  for (long k = 0; k < 2000000; ++k) {
    const long double arg = static_cast<long double>(p.alpha) * k + p.beta;
    const long double mag = std::exp(k * log_abs_z - std::lgamma(arg));
    const long double term = (negative && (k % 2 == 1)) ? -mag : mag;
    const long double y = term - comp;
    const long double tmp = sum + y;
    comp = (tmp - sum) - y;
    sum = tmp;
    peak = std::max(peak, mag);
    if (k > k_peak && mag <= LDBL_EPSILON * 1e-3L * std::max(std::abs(sum), 1e-300L)) break;
    if (k > k_peak && mag == 0.0L) break;
  }
  if (peak_term) *peak_term = static_cast<double>(peak);
  return static_cast<double>(sum);
}

double ml_laplace(MLParams p, double z, double* achieved_log_eps) {
  validate(p);
  if (z == 0.0) return rgamma(p.beta);
  const double alpha = p.alpha, beta = p.beta, gama = 1.0, t = 1.0;
  double log_epsilon = std::log(1e-15);
  const cplx lambda(z, 0.0);

  // poles s^alpha = lambda
  const double theta = std::arg(lambda);
  const int kmin = static_cast<int>(std::ceil(-alpha / 2.0 - theta / 2.0 / kPi));
  const int kmax = static_cast<int>(std::floor(alpha / 2.0 - theta / 2.0 / kPi));
  struct Sing {
    cplx s;
    double phi;
  };
  std::vector<Sing> poles;
  const double r = std::pow(std::abs(z), 1.0 / alpha);
  for (int k = kmin; k <= kmax; ++k) {
    const cplx s = std::polar(r, (theta + 2.0 * k * kPi) / alpha);
    const double phi = (s.real() + std::abs(s)) / 2.0;
    if (phi > 1e-15) poles.push_back({s, phi});
  }
  std::stable_sort(poles.begin(), poles.end(), [](const Sing& a, const Sing& b) { return a.phi < b.phi; });

  std::vector<cplx> s_star{cplx(0.0, 0.0)};
  std::vector<double> phi{0.0};
  for (const auto& pl : poles) {
    s_star.push_back(pl.s);
    phi.push_back(pl.phi);
  }
  const std::size_t j1_count = s_star.size();
  std::vector<double> pp(j1_count, gama), qq(j1_count, gama);
  pp[0] = std::max(0.0, -2.0 * (alpha * gama - beta + 1.0));
  qq[j1_count - 1] = kInf;
  phi.push_back(kInf);

  std::vector<std::size_t> admissible;
  const double phi_limit_offset = -std::log(DBL_EPSILON);
  Contour best;
  std::size_t best_region = 0;
  for (int relax = 0; relax < 40; ++relax) {
    admissible.clear();
    for (std::size_t j = 0; j < j1_count; ++j)
      if (phi[j] < (log_epsilon + phi_limit_offset) / t && phi[j] < phi[j + 1]) admissible.push_back(j);
    best = Contour{};
    for (std::size_t j : admissible) {
      const Contour c = j + 1 < j1_count
                            ? optimal_param_bounded(t, phi[j], phi[j + 1], pp[j], qq[j], log_epsilon)
                            : optimal_param_unbounded(t, phi[j], pp[j], log_epsilon);
      if (c.n < best.n) {
        best = c;
        best_region = j;
      }
    }
    if (best.n <= 200.0) break;
    log_epsilon += std::log(10.0);
  }
  if (achieved_log_eps) *achieved_log_eps = log_epsilon;
  if (!std::isfinite(best.n))
    throw AccuracyLossError("Mittag-Leffler: no admissible integration contour", std::exp(log_epsilon));

  const long n = static_cast<long>(best.n);
  cplx sum(0.0, 0.0);
  for (long k = -n; k <= n; ++k) {
    const double u = best.h * static_cast<double>(k);
    const cplx zz = best.mu * std::pow(cplx(1.0, u), 2);
    const cplx zd(-2.0 * best.mu * u, 2.0 * best.mu);
    const cplx f = std::pow(zz, alpha * gama - beta) / std::pow(std::pow(zz, alpha) - lambda, gama) * zd;
    sum += std::exp(zz * t) * f;
  }
  const cplx integral = best.h * sum / (2.0 * kPi * cplx(0.0, 1.0));

  cplx residues(0.0, 0.0);
  for (std::size_t j = best_region + 1; j < j1_count; ++j)
    residues += 1.0 / alpha * std::pow(s_star[j], 1.0 - beta) * std::exp(t * s_star[j]);
  return (integral + residues).real();
}

double ml(MLParams p, double z) {
  validate(p);
  if (!std::isfinite(z)) throw DomainError("Mittag-Leffler: argument must be finite");
  if (z == 0.0) return rgamma(p.beta);
  if (std::abs(z) <= kMLSeriesRadius) {
    double peak = 0.0;
    const double s = ml_series(p, z, &peak);
    // extended-precision accumulation: round-off ~ peak * LDBL_EPSILON * (few)
    if (peak * LDBL_EPSILON * 64.0 < kMLTolerance * 1e-2 * std::max(1.0, std::abs(s))) return s;
  }
  double log_eps = 0.0;
  const double v = ml_laplace(p, z, &log_eps);
  const double bound = std::exp(log_eps);
  if (!std::isfinite(v)) throw AccuracyLossError("Mittag-Leffler: value not representable", kInf);
  if (bound > kMLTolerance)
    throw AccuracyLossError("Mittag-Leffler: tolerance relaxed beyond target", bound);
  return v;
}

double ml_decomp_g(double alpha, int k, double t) {
  check_decomp_args(alpha, k, "ml_decomp_g");
  if (t < 0.0) throw DomainError("ml_decomp_g: t must be non-negative");
  const double c = std::cos(kPi / alpha), s = std::sin(kPi / alpha);
  return 2.0 / alpha * std::exp(t * c) * std::cos(t * s - kPi * k / alpha);
}

double ml_decomp_f(double alpha, int k, double t) {
  check_decomp_args(alpha, k, "ml_decomp_f");
  if (!(t > 0.0)) throw DomainError("ml_decomp_f: t must be positive");
  const double sin_pa = std::sin(kPi * alpha), cos_pa = std::cos(kPi * alpha);
  if (sin_pa == 0.0) return 0.0;
  const double expo = alpha - static_cast<double>(k);
  // log of |integrand| after r = e^u (dr = e^u du)
  auto log_abs = [&](double u) {
    const double ra = std::exp(alpha * u);
    return -t * std::exp(u) + expo * u + std::log(std::abs(sin_pa)) -
           std::log(ra * ra + 2.0 * ra * cos_pa + 1.0);
  };
  auto integrand = [&](double u) {
    const double ra = std::exp(alpha * u);
    return std::exp(-t * std::exp(u) + expo * u) * sin_pa / (ra * ra + 2.0 * ra * cos_pa + 1.0);
  };

  // locate the peak on a coarse scan, then walk out to the 1e-16 cut
  double u_peak = 0.0, log_peak = -kInf;
  for (double u = -60.0; u <= 15.0; u += 0.05) {
    const double l = log_abs(u);
    if (l > log_peak) {
      log_peak = l;
      u_peak = u;
    }
  }
  const double cut = log_peak + std::log(1e-16);
  double u_lo = u_peak, u_hi = u_peak;
  while (log_abs(u_lo) > cut && u_lo > -5000.0) u_lo -= 0.5;
  while (log_abs(u_hi) > cut && u_hi < 50.0) u_hi += 0.25;

  const auto& gl = detail::gauss_legendre<20>();
  auto composite = [&](int panels) {
    const double w = (u_hi - u_lo) / panels;
    double acc = 0.0;
    for (int i = 0; i < panels; ++i) {
      const double mid = u_lo + (i + 0.5) * w;
      double part = 0.0;
      for (int q = 0; q < 20; ++q) part += gl.w[q] * integrand(mid + 0.5 * w * gl.x[q]);
      acc += 0.5 * w * part;
    }
    return acc;
  };
  int panels = 8;
  double prev = composite(panels);
  double cur = prev;
  for (int it = 0; it < 14; ++it) {
    panels *= 2;
    cur = composite(panels);
    if (std::abs(cur - prev) < kPanelTolerance) break;
    prev = cur;
  }
  const double sign = k == 0 ? 1.0 : -1.0;
  return sign / kPi * cur;
}

}  // namespace fracdyn
