#pragma once

#include "fracdyn/grid.hpp"
#include "fracdyn/kernels.hpp"

namespace fracdyn {

/// Linear fractional oscillator  _0D^{alpha-1}_t q + omega2 q = Q(t)
/// with the forcing produced by integrating the 1D linear fractional constraint,
///   Q(t) = t^{m-alpha+1}/Gamma(m-alpha+2) q(0) + c1 t + c2.
struct OscillatorSpec {
  enum class Forcing { kChain, kNone };

  double alpha = 2.5;
  double omega2 = 1.0;
  double q0 = 1.0;
  double qp0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  Forcing forcing = Forcing::kChain;

  /// Constants fixed by the initial data: c2 = Q(0) = omega2 q0 and
  /// c1 = Q'(0) = omega2 qp0 (assumes q''(0) finite, so d/dt D^{alpha-1}q vanishes at 0).
  static OscillatorSpec from_initial_data(double alpha, double omega2, double q0, double qp0);
  /// Q identically zero.
  static OscillatorSpec homogeneous(double alpha, double omega2, double q0, double qp0);

  int m() const;
  double derivative_order() const { return alpha - 1.0; }
  void validate_exact() const;
};

double forcing(const OscillatorSpec& spec, double t);

/// Convolution step used by exact_solution; grid nodes are resampled on a
/// step no coarser than this.
inline constexpr double kConvolutionStep = 1.0 / 2048.0;

/// q(t) = q0 E_{b,1}(-w t^b) + t qp0 E_{b,2}(-w t^b) + int_0^t Q(t-tau) tau^{b-1} E_{b,b}(-w tau^b) dtau
/// with b = alpha - 1, w = omega2. Requires 2 < alpha < 3 and a grid starting at 0.
SampleSeries exact_solution(const OscillatorSpec& spec, const Grid& grid,
                            kernels::Exec exec = kernels::Exec::kParallel);

/// Forcing convolution term alone (third term above).
SampleSeries forcing_convolution(const OscillatorSpec& spec, const Grid& grid,
                                 kernels::Exec exec = kernels::Exec::kParallel);

/// Same trajectory with the homogeneous part assembled from the monotone and
/// oscillatory pieces f_{b,k} + g_{b,k}. Requires omega2 == 1.
SampleSeries decomposed_solution(const OscillatorSpec& spec, const Grid& grid);

}  // namespace fracdyn
