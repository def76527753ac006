#include "fracdyn/fode_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracdyn/kernels.hpp"

namespace fracdyn {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::kSemiImplicitEuler: return "semi-implicit-euler";
    case Scheme::kVelocityVerlet: return "velocity-verlet";
    case Scheme::kAbmFractional: return "abm-fractional";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "semi-implicit-euler") return Scheme::kSemiImplicitEuler;
  if (s == "velocity-verlet" || s == "velocity-verlet-with-lagged-history") return Scheme::kVelocityVerlet;
  if (s == "abm-fractional") return Scheme::kAbmFractional;
  throw DomainError("unknown scheme '" + s + "'");
}

Grid IntegratorConfig::grid() const {
  validate();
  return Grid::with_step(0.0, t_end, h);
}

void IntegratorConfig::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("integrator: h must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw DomainError("integrator: t_end must be positive");
  if (history_window && *history_window < 10)
    throw DomainError("integrator: history window must be at least 10 steps");
}

TrajectoryHistory::TrajectoryHistory(std::size_t dim, double t0, double h, std::size_t capacity)
    : dim_(dim), t0_(t0), h_(h), capacity_(capacity), q_(dim), v_(dim) {
  for (auto& c : q_) c.reserve(capacity);
  for (auto& c : v_) c.reserve(capacity);
}

std::span<const double> TrajectoryHistory::q(std::size_t k) const { return q_[k]; }
std::span<const double> TrajectoryHistory::v(std::size_t k) const { return v_[k]; }

Eigen::VectorXd TrajectoryHistory::q_at(std::size_t j) const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(dim_));
  for (std::size_t k = 0; k < dim_; ++k) x[static_cast<Eigen::Index>(k)] = q_[k][j];
  return x;
}

Eigen::VectorXd TrajectoryHistory::v_at(std::size_t j) const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(dim_));
  for (std::size_t k = 0; k < dim_; ++k) x[static_cast<Eigen::Index>(k)] = v_[k][j];
  return x;
}

void TrajectoryHistory::push(const Eigen::VectorXd& q, const Eigen::VectorXd& v) {
  for (std::size_t k = 0; k < dim_; ++k) {
    q_[k].push_back(q[static_cast<Eigen::Index>(k)]);
    v_[k].push_back(v[static_cast<Eigen::Index>(k)]);
  }
  ++count_;
}

void TrajectoryHistory::overwrite_newest_velocity(const Eigen::VectorXd& v) {
  for (std::size_t k = 0; k < dim_; ++k) v_[k].back() = v[static_cast<Eigen::Index>(k)];
}

Eigen::VectorXd ClassicalSystem::accelerations(const TrajectoryHistory& hist) {
  const std::size_t j = hist.newest();
  return f_(hist.time(j), hist.q_at(j), hist.v_at(j));
}

SampleSeries SimulationResult::position(std::size_t k) const {
  std::vector<double> v(q.size());
  for (std::size_t j = 0; j < q.size(); ++j) v[j] = q[j][static_cast<Eigen::Index>(k)];
  return {grid, std::move(v)};
}

SampleSeries SimulationResult::velocity(std::size_t k) const {
  if (qdot.size() != q.size()) throw DomainError("SimulationResult: no velocity trajectory");
  std::vector<double> v(qdot.size());
  for (std::size_t j = 0; j < qdot.size(); ++j) v[j] = qdot[j][static_cast<Eigen::Index>(k)];
  return {grid, std::move(v)};
}

double SimulationResult::max_abs_residual() const {
  double m = 0.0;
  for (double r : constraint_residual) m = std::max(m, std::abs(r));
  return m;
}

std::size_t SimulationResult::total_history_terms() const {
  std::size_t n = 0;
  for (const auto& d : diagnostics) n += d.history_terms;
  return n;
}

SimulationDivergence::SimulationDivergence(const std::string& what, double t, std::size_t step,
                                           SimulationResult partial)
    : DivergenceError(what, t, step), partial_(std::move(partial)) {}

namespace {

bool blown_up(const Eigen::VectorXd& x, double threshold) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || std::abs(x[i]) > threshold) return true;
  return false;
}

[[noreturn]] void diverge(SimulationResult& res, std::size_t j, double t) {
  const std::size_t kept = res.q.size();
  if (kept >= 2) res.grid = Grid(res.grid.t_start(), res.grid.node(kept - 1), kept - 1);
  throw SimulationDivergence("state exceeded the divergence threshold", t, j, std::move(res));
}

void record(SimulationResult& res, SecondOrderSystem& rhs, const TrajectoryHistory& hist) {
  res.multiplier.push_back(rhs.last_multiplier());
  if (auto r = rhs.constraint_residual(hist)) res.constraint_residual.push_back(*r);
  res.diagnostics.push_back(rhs.last_diagnostics());
}

}  // namespace

SimulationResult integrate_second_order(SecondOrderSystem& rhs, const Eigen::VectorXd& q0,
                                        const Eigen::VectorXd& v0, const IntegratorConfig& cfg) {
  cfg.validate();
  if (cfg.scheme == Scheme::kAbmFractional)
    throw DomainError("integrate_second_order: abm-fractional applies to integrate_fractional_abm");
  const std::size_t n = rhs.dimension();
  if (static_cast<std::size_t>(q0.size()) != n || static_cast<std::size_t>(v0.size()) != n)
    throw DomainError("integrate_second_order: initial state has wrong dimension");

  const Grid grid = cfg.grid();
  const double h = grid.step();
  SimulationResult res;
  res.grid = grid;
  res.scheme = cfg.scheme;
  res.h = h;
  res.q.reserve(grid.size());
  res.qdot.reserve(grid.size());

  TrajectoryHistory hist(n, grid.t_start(), h, grid.size());
  hist.set_position_weight(cfg.scheme == Scheme::kSemiImplicitEuler ? 1.0 : 0.5);
  Eigen::VectorXd q = q0, v = v0;
  hist.push(q, v);
  Eigen::VectorXd a = rhs.accelerations(hist);
  res.q.push_back(q);
  res.qdot.push_back(v);
  record(res, rhs, hist);

  for (std::size_t j = 0; j < grid.n_steps(); ++j) {
    if (cfg.scheme == Scheme::kSemiImplicitEuler) {
      v = v + h * a;
      q = q + h * v;
      hist.push(q, v);
      a = rhs.accelerations(hist);
    } else {
      const Eigen::VectorXd q1 = q + h * v + 0.5 * h * h * a;
      hist.push(q1, v + h * a);
      const Eigen::VectorXd a1 = rhs.accelerations(hist);
      v = v + 0.5 * h * (a + a1);
      hist.overwrite_newest_velocity(v);
      q = q1;
      a = a1;
    }
    if (blown_up(q, cfg.divergence_threshold) || blown_up(v, cfg.divergence_threshold) ||
        blown_up(a, std::numeric_limits<double>::max()))
      diverge(res, j + 1, grid.node(j + 1));
    res.q.push_back(q);
    res.qdot.push_back(v);
    record(res, rhs, hist);
  }
  return res;
}

SimulationResult integrate_fractional_abm(double alpha,
                                          const std::function<double(double, double)>& f,
                                          std::span<const double> init,
                                          const IntegratorConfig& cfg) {
  cfg.validate();
  if (!(alpha > 0.0 && alpha < 3.0)) throw DomainError("abm: order must lie in (0,3)");
  const std::size_t m = static_cast<std::size_t>(std::ceil(alpha));
  if (init.size() < m) throw DomainError("abm: need " + std::to_string(m) + " initial values");

  const Grid grid = cfg.grid();
  const double h = grid.step();
  const std::size_t n = grid.n_steps();
  auto taylor = [&](double t) {
    double acc = 0.0, pw = 1.0, fact = 1.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (k > 0) {
        pw *= t;
        fact *= static_cast<double>(k);
      }
      acc += pw / fact * init[k];
    }
    return acc;
  };

  const kernels::ProductTrapezoidWeights corr(alpha, n);
  std::vector<double> pred(n + 1);  // (d+1)^alpha - d^alpha
  for (std::size_t d = 0; d <= n; ++d) {
    const double x = static_cast<double>(d);
    pred[d] = d == 0 ? 1.0 : std::pow(x, alpha) * std::expm1(alpha * std::log1p(1.0 / x));
  }
  const double pred_scale = std::pow(h, alpha) / std::tgamma(alpha + 1.0);
  const double corr_scale = corr.scale(h);

  SimulationResult res;
  res.grid = grid;
  res.scheme = Scheme::kAbmFractional;
  res.h = h;
  std::vector<double> x(n + 1), fx(n + 1);
  x[0] = taylor(0.0);
  fx[0] = f(grid.node(0), x[0]);
  res.q.push_back(Eigen::VectorXd::Constant(1, x[0]));
  res.diagnostics.push_back({});
  for (std::size_t j = 0; j < n; ++j) {
    const double t1 = grid.node(j + 1);
    double p = 0.0;
    for (std::size_t i = 0; i <= j; ++i) p += pred[j - i] * fx[i];
    const double xp = taylor(t1) + pred_scale * p;
    double c = corr.start(j + 1) * fx[0];
    for (std::size_t i = 1; i <= j; ++i) c += corr.interior(j + 1 - i) * fx[i];
    c += f(t1, xp);
    x[j + 1] = taylor(t1) + corr_scale * c;
    fx[j + 1] = f(t1, x[j + 1]);
    if (!std::isfinite(x[j + 1]) || std::abs(x[j + 1]) > cfg.divergence_threshold)
      diverge(res, j + 1, t1);
    res.q.push_back(Eigen::VectorXd::Constant(1, x[j + 1]));
    res.diagnostics.push_back({2 * (j + 1), 0.0});
  }
  return res;
}

}  // namespace fracdyn
