#include "fracdyn/grid.hpp"

#include <algorithm>
#include <string>

#include "fracdyn/errors.hpp"

namespace fracdyn {

Grid::Grid(double t_start, double t_end, std::size_t n_steps)
    : t_start_(t_start), t_end_(t_end), n_steps_(n_steps), h_(0.0) {
  if (n_steps == 0) throw DomainError("Grid: n_steps must be >= 1");
  if (!(t_end > t_start) || !std::isfinite(t_start) || !std::isfinite(t_end))
    throw DomainError("Grid: require finite t_start < t_end");
  h_ = (t_end - t_start) / static_cast<double>(n_steps);
}

Grid Grid::with_step(double t_start, double t_end, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("Grid: step must be positive");
  const double n = std::ceil((t_end - t_start) / h - 1e-9);
  return Grid(t_start, t_end, static_cast<std::size_t>(std::max(1.0, n)));
}

std::vector<double> Grid::nodes() const {
  std::vector<double> t(size());
  for (std::size_t j = 0; j < t.size(); ++j) t[j] = node(j);
  return t;
}

SampleSeries::SampleSeries(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw DomainError("SampleSeries: expected " + std::to_string(grid_.size()) + " samples, got " +
                      std::to_string(values_.size()));
}

SampleSeries SampleSeries::sample(const Grid& grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid.node(j));
  return {grid, std::move(v)};
}

SampleSeries SampleSeries::zeros(const Grid& grid) {
  return {grid, std::vector<double>(grid.size(), 0.0)};
}

SampleSeries SampleSeries::prefix(std::size_t last) const {
  if (last == 0 || last > grid_.n_steps()) throw DomainError("SampleSeries::prefix: bad index");
  Grid g(grid_.t_start(), grid_.node(last), last);
  return {g, std::vector<double>(values_.begin(), values_.begin() + static_cast<long>(last) + 1)};
}

namespace {
template <class F>
double sup_over(const Grid& g, double t_lo, double t_hi, F&& diff) {
  double worst = 0.0;
  const double slack = 1e-9 * g.step();
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double t = g.node(j);
    if (t < t_lo - slack || t > t_hi + slack) continue;
    const double d = diff(j, t);
    if (std::isnan(d)) continue;
    worst = std::max(worst, std::abs(d));
  }
  return worst;
}
}  // namespace

double sup_distance(const SampleSeries& a, const SampleSeries& b, double t_lo, double t_hi) {
  if (a.size() != b.size()) throw DomainError("sup_distance: grid mismatch");
  return sup_over(a.grid(), t_lo, t_hi, [&](std::size_t j, double) { return a[j] - b[j]; });
}

double sup_distance(const SampleSeries& a, const std::function<double(double)>& f, double t_lo,
                    double t_hi) {
  return sup_over(a.grid(), t_lo, t_hi, [&](std::size_t j, double t) { return a[j] - f(t); });
}

FracOrder::FracOrder(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw DomainError("FracOrder: alpha must be positive, got " + std::to_string(alpha));
  const double fl = std::floor(alpha);
  integer_ = alpha == fl;
  m_ = static_cast<int>(fl) + (integer_ ? 0 : 1);
  epsilon_ = static_cast<double>(m_) - alpha;
}

void FracOrder::require_fractional(const char* op) const {
  if (integer_)
    throw UnsupportedOrderError(std::string(op) + ": integer order " + std::to_string(alpha_) +
                                " - use the classical derivative");
}

double rgamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) return 0.0;
  return 1.0 / std::tgamma(x);
}

}  // namespace fracdyn
