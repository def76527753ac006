#pragma once

namespace fracdyn {

/// Parameters of the two-parameter Mittag-Leffler function
///   E_{alpha,beta}(z) = sum_k z^k / Gamma(alpha k + beta).
struct MLParams {
  double alpha;
  double beta;
};

/// Radius up to which the power series is tried first. Beyond it, or when
/// the series would cancel catastrophically, the Laplace-inversion method
/// takes over.
inline constexpr double kMLSeriesRadius = 5.0;

/// Accuracy target (absolute, for |E| <= 1; relative above) of ml().
inline constexpr double kMLTolerance = 1e-10;

/// E_{alpha,beta}(z) for real z. Throws DomainError for alpha <= 0 or
/// beta <= 0 and AccuracyLossError when the target cannot be met.
double ml(MLParams params, double z);

/// Truncated power series accumulated in extended precision. `peak_term`
/// receives the largest term magnitude (a cancellation indicator).
double ml_series(MLParams params, double z, double* peak_term = nullptr);

/// Numerical inversion of the Laplace transform s^{alpha-beta}/(s^alpha - z)
/// along an optimal parabolic contour plus the residues of the poles left of
/// it (Garrappa's method). `achieved_log_eps` receives the log of the
/// tolerance the contour parameters were finally built for.
double ml_laplace(MLParams params, double z, double* achieved_log_eps = nullptr);

/// Monotone part of the decomposition of E_alpha(-t^alpha), 1 < alpha < 2:
///   f_{alpha,k}(t) = ((-1)^k/pi) int_0^inf e^{-rt} r^{alpha-1-k} sin(pi alpha)
///                    / (r^{2alpha} + 2 r^alpha cos(pi alpha) + 1) dr.
/// Evaluated on r = e^u with composite Gauss-Legendre panels.
double ml_decomp_f(double alpha, int k, double t);

/// Oscillatory part: (2/alpha) e^{t cos(pi/alpha)} cos(t sin(pi/alpha) - pi k/alpha).
double ml_decomp_g(double alpha, int k, double t);

}  // namespace fracdyn
