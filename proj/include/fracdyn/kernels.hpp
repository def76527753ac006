#pragma once

// Memory-kernel convolution sums shared by the fractional operators and the
// exact oscillator solution. Every kernel has a serial reference and an
// OpenMP version; both evaluate each output node with the same summation
// order, so their results are bit-identical.

#include <cstddef>
#include <exception>
#include <span>
#include <vector>

namespace fracdyn::kernels {

enum class Exec { kSerial, kParallel };

/// Weights of the product-trapezoidal rule for J^eps on a uniform grid.
///
/// (J^eps f)(t_j) ~= h^eps/Gamma(eps+2) * ( start(j) f_0
///                    + sum_{k=1}^{j-1} interior[j-k] f_k + f_j )
class ProductTrapezoidWeights {
 public:
  ProductTrapezoidWeights(double eps, std::size_t n_max);

  double eps() const noexcept { return eps_; }
  double scale(double h) const;
  double start(std::size_t j) const noexcept { return start_[j]; }
  double interior(std::size_t d) const noexcept { return interior_[d]; }
  std::size_t n_max() const noexcept { return interior_.size() - 1; }

 private:
  double eps_;
  std::vector<double> start_;
  std::vector<double> interior_;
};

/// Single node of the product-trapezoidal fractional integral (causal).
double fractional_integral_at(std::span<const double> f, std::size_t j,
                              const ProductTrapezoidWeights& w, double h);

/// All nodes; out[0] = 0.
void fractional_integral(std::span<const double> f, double eps, double h, std::span<double> out,
                         Exec exec = Exec::kParallel);

/// Weights b_i = (i+1)^{1-beta} - i^{1-beta} of the L1 scheme, 0 < beta < 1.
class L1Weights {
 public:
  L1Weights(double beta, std::size_t n_max);

  double beta() const noexcept { return beta_; }
  double operator[](std::size_t i) const noexcept { return b_[i]; }
  std::size_t n_max() const noexcept { return b_.size(); }
  /// Grows the table so that indices < n are valid.
  void reserve(std::size_t n);

 private:
  double beta_;
  std::vector<double> b_;
};

/// sum_{k=0}^{j-1} b_{j-1-k} * increments[k], the raw L1 history sum.
double l1_history_sum(std::span<const double> increments, std::size_t j, const L1Weights& w);

/// L1 Caputo derivative of order beta in (0,1) at every node of x.
void l1_caputo(std::span<const double> x, double beta, double h, std::span<double> out,
               Exec exec = Exec::kParallel);

/// out_j = sum_{i=0}^{j-1} [ lower_i * q_{j-i} * g_i + upper_i * q_{j-i-1} * g_{i+1} ]
///
/// Piecewise-linear product integration of int_0^{t_j} Q(t_j - tau) g(tau) w(tau) dtau,
/// where lower_i/upper_i are the moments of the weight w against the two hat
/// functions on panel i.
void weighted_convolution(std::span<const double> q, std::span<const double> g,
                          std::span<const double> lower, std::span<const double> upper,
                          std::span<double> out, Exec exec = Exec::kParallel);

/// Thread count used by the parallel kernels (FRACDYN_THREADS caps it).
int max_threads();

/// Runs body(i) for i in [0, n), in parallel when exec says so. The first
/// exception thrown by any iteration is rethrown on the calling thread.
template <class Body>
void for_each_index(long n, Exec exec, Body&& body) {
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16) num_threads(max_threads()) \
    if (exec == Exec::kParallel && n > 16)
  for (long i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(fracdyn_for_each_index)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace fracdyn::kernels
