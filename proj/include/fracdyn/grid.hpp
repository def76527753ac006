#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fracdyn {

/// Uniform time grid t_j = t_start + j*h, j = 0..n_steps.
class Grid {
 public:
  Grid(double t_start, double t_end, std::size_t n_steps);

  /// Grid on [t_start, t_end] whose step does not exceed `h`.
  static Grid with_step(double t_start, double t_end, double h);

  double t_start() const noexcept { return t_start_; }
  double t_end() const noexcept { return t_end_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  std::size_t size() const noexcept { return n_steps_ + 1; }
  double step() const noexcept { return h_; }
  double node(std::size_t j) const noexcept {
    return t_start_ + static_cast<double>(j) * h_;
  }
  std::vector<double> nodes() const;

  bool operator==(const Grid& other) const = default;

 private:
  double t_start_;
  double t_end_;
  std::size_t n_steps_;
  double h_;
};

/// Samples of a scalar function of time on a Grid. Immutable.
///
/// Operators that are singular at the left endpoint store NaN in slot 0;
/// the norms below skip NaN entries.
class SampleSeries {
 public:
  SampleSeries(Grid grid, std::vector<double> values);

  static SampleSeries sample(const Grid& grid, const std::function<double(double)>& f);
  static SampleSeries zeros(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t j) const noexcept { return values_[j]; }
  double back() const noexcept { return values_.back(); }

  /// Leading samples 0..last (inclusive), on the matching shorter grid.
  SampleSeries prefix(std::size_t last) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// max_j |a_j - b_j| over nodes with t in [t_lo, t_hi]; NaN slots are skipped.
double sup_distance(const SampleSeries& a, const SampleSeries& b, double t_lo, double t_hi);
double sup_distance(const SampleSeries& a, const std::function<double(double)>& f, double t_lo,
                    double t_hi);

/// Order of a fractional operator. For non-integer alpha, m = floor(alpha)+1
/// and epsilon = m - alpha lies in (0,1).
class FracOrder {
 public:
  explicit FracOrder(double alpha);

  double alpha() const noexcept { return alpha_; }
  int m() const noexcept { return m_; }
  double epsilon() const noexcept { return epsilon_; }
  bool is_integer() const noexcept { return integer_; }

  /// Throws UnsupportedOrderError for integer orders.
  void require_fractional(const char* op) const;

 private:
  double alpha_;
  int m_;
  double epsilon_;
  bool integer_;
};

/// Gamma function (platform implementation).
inline double gamma_fn(double x) { return std::tgamma(x); }

/// 1/Gamma(x), zero at the poles x = 0, -1, -2, ...
double rgamma(double x);

}  // namespace fracdyn
