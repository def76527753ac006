#include "fracdyn/constrained_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fracdyn {

namespace {

using Eigen::VectorXd;

VectorXd eval_or_zero(const GeneralConstraint::Gradient& g, const ConstraintPoint& x) {
  return g ? g(x) : VectorXd::Zero(x.q.size());
}

std::string dump(const char* what, double t, const VectorXd& q, const VectorXd& v) {
  std::ostringstream os;
  os.precision(17);
  os << what << " at t = " << t << ", q = [" << q.transpose() << "], q' = [" << v.transpose()
     << "]";
  return os.str();
}

constexpr double kSingularGradient = 1e-24;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

GeneralConstraint to_general(const LinearConstraint& c) {
  GeneralConstraint g;
  g.order = c.order;
  g.f = [a = c.a, b = c.b](const ConstraintPoint& x) { return a.dot(x.qdot) + b.dot(x.d_left); };
  g.d_qdot = [a = c.a](const ConstraintPoint&) { return a; };
  g.d_dleft = [b = c.b](const ConstraintPoint&) { return b; };
  return g;
}

const FracOrder& constraint_order(const ConstraintSpec& c) {
  return std::visit([](const auto& x) -> const FracOrder& { return x.order; }, c);
}

Potential Potential::zero() {
  return {[](const VectorXd&) { return 0.0; },
          [](const VectorXd& q) { return VectorXd::Zero(q.size()).eval(); }};
}

Potential Potential::quadratic(VectorXd k) {
  return {[k](const VectorXd& q) { return 0.5 * (k.array() * q.array().square()).sum(); },
          [k](const VectorXd& q) { return (k.array() * q.array()).matrix().eval(); }};
}

void SystemSpec::validate() const {
  if (n == 0) throw DomainError("system: dimension must be positive");
  const auto sz = static_cast<Eigen::Index>(n);
  if (q_init.size() != sz || qdot_init.size() != sz)
    throw DomainError("system: initial data must have length n");
  if (higher_init && higher_init->size() != sz)
    throw DomainError("system: higher_init must have length n");
  if (!potential.value || !potential.gradient) throw DomainError("system: potential missing");
  if (!constraint) return;
  if (const auto* lin = std::get_if<LinearConstraint>(&*constraint)) {
    if (lin->a.size() != sz || lin->b.size() != sz)
      throw DomainError("constraint: a and b must have length n");
  } else {
    const auto& g = std::get<GeneralConstraint>(*constraint);
    if (!g.f || !g.d_qdot) throw DomainError("constraint: f and df/dq' are required");
  }
  constraint_order(*constraint).require_fractional("constraint");
}

double lambda_general(const SystemSpec& sys, const ConstraintPoint& x, const FracRates& rates) {
  if (!sys.constraint) return 0.0;
  const GeneralConstraint g = std::holds_alternative<GeneralConstraint>(*sys.constraint)
                                  ? std::get<GeneralConstraint>(*sys.constraint)
                                  : to_general(std::get<LinearConstraint>(*sys.constraint));
  const VectorXd fv = g.d_qdot(x);
  const double norm2 = fv.squaredNorm();
  if (!(norm2 > kSingularGradient))
    throw SingularConstraintError(dump("vanishing Chetaev gradient df/dq'", kNaN, x.q, x.qdot));
  double num = fv.dot(sys.potential.gradient(x.q));
  num -= eval_or_zero(g.d_dleft, x).dot(rates.d1_left);
  if (rates.d1_right.size() > 0) num -= eval_or_zero(g.d_dright, x).dot(rates.d1_right);
  num -= eval_or_zero(g.d_q, x).dot(x.qdot);
  return num / norm2;
}

VectorXd general_accelerations(const SystemSpec& sys, const ConstraintPoint& x,
                               const FracRates& rates) {
  VectorXd acc = -sys.potential.gradient(x.q);
  if (!sys.constraint) return acc;
  const GeneralConstraint g = std::holds_alternative<GeneralConstraint>(*sys.constraint)
                                  ? std::get<GeneralConstraint>(*sys.constraint)
                                  : to_general(std::get<LinearConstraint>(*sys.constraint));
  return acc + g.d_qdot(x) * lambda_general(sys, x, rates);
}

Eigen::MatrixXd projector(const VectorXd& a) {
  const double a2 = a.squaredNorm();
  if (!(a2 > 0.0)) throw SingularConstraintError("projector: a = 0");
  return Eigen::MatrixXd::Identity(a.size(), a.size()) - a * a.transpose() / a2;
}

VectorXd linear_accelerations(const LinearConstraint& c, const VectorXd& grad_u,
                              const VectorXd& d1_left) {
  const double a2 = c.a.squaredNorm();
  if (!(a2 > 0.0)) throw SingularConstraintError("linear constraint: a = 0");
  return -(grad_u - c.a * (c.a.dot(grad_u) / a2)) - c.a * (c.b.dot(d1_left) / a2);
}

D1DalphaMode default_mode(const FracOrder& order) {
  return order.alpha() < 1.0 ? D1DalphaMode::kShifted : D1DalphaMode::kDirect;
}

ConstrainedSystem::ConstrainedSystem(SystemSpec sys, ConstrainedOptions opts)
    : sys_(std::move(sys)), opts_(opts), v0_(sys_.qdot_init) {
  sys_.validate();
  const auto n = static_cast<Eigen::Index>(sys_.n);
  higher_ = VectorXd::Zero(n);
  dalpha_.assign(sys_.n, {});
  if (!sys_.constraint) return;
  if (const auto* lin = std::get_if<LinearConstraint>(&*sys_.constraint)) {
    if (!(lin->a.squaredNorm() > 0.0)) throw SingularConstraintError("linear constraint: a = 0");
    linear_ = *lin;
    general_ = to_general(*lin);
  } else {
    general_ = std::get<GeneralConstraint>(*sys_.constraint);
  }

  // Caputo derivatives vanish at t = a for the data handled here.
  auto at_start = [&](const VectorXd& v) {
    return ConstraintPoint{sys_.q_init, v, VectorXd::Zero(n), VectorXd::Zero(n)};
  };
  double f0 = general_->f(at_start(v0_));
  if (std::abs(f0) > opts_.initial_tolerance) {
    if (!opts_.project_initial) {
      std::ostringstream os;
      os.precision(17);
      os << "initial data violates the constraint: |f| = " << std::abs(f0) << " > "
         << opts_.initial_tolerance;
      throw ConstraintViolationError(os.str());
    }
    for (int it = 0; it < 50 && std::abs(f0) > opts_.initial_tolerance; ++it) {
      const VectorXd fv = general_->d_qdot(at_start(v0_));
      if (!(fv.squaredNorm() > kSingularGradient))
        throw SingularConstraintError(dump("vanishing Chetaev gradient", 0.0, sys_.q_init, v0_));
      v0_ -= fv * (f0 / fv.squaredNorm());
      f0 = general_->f(at_start(v0_));
    }
    if (std::abs(f0) > opts_.initial_tolerance)
      throw ConstraintViolationError("projection of the initial velocity did not converge");
  }

  const FracOrder& ord = general_->order;
  if (!opts_.mode) opts_.mode = default_mode(ord);
  if (ord.m() == 1) {
    higher_ = v0_;
  } else if (sys_.higher_init) {
    higher_ = *sys_.higher_init;
  } else {
    // one-sided estimate at t = a with the memory terms dropped
    const FracRates none{VectorXd::Zero(n), {}};
    const ConstraintPoint x = at_start(v0_);
    higher_ = linear_ ? linear_accelerations(*linear_, sys_.potential.gradient(sys_.q_init),
                                             none.d1_left)
                      : general_accelerations(sys_, x, none);
  }
}

ConstraintPoint ConstrainedSystem::point(const TrajectoryHistory& hist, std::size_t j) const {
  const auto n = static_cast<Eigen::Index>(sys_.n);
  ConstraintPoint x{hist.q_at(j), hist.v_at(j), VectorXd::Zero(n), VectorXd::Zero(n)};
  for (std::size_t k = 0; k < sys_.n; ++k) x.d_left[static_cast<Eigen::Index>(k)] = dalpha_[k][j];
  return x;
}

void ConstrainedSystem::update_dalpha(const TrajectoryHistory& hist) {
  const std::size_t j = hist.newest();
  const FracOrder& ord = general_->order;
  if (q_hist_.empty()) {
    for (std::size_t k = 0; k < sys_.n; ++k) {
      q_hist_.emplace_back(ord, hist.step(), opts_.history_window);
      if (mode() == D1DalphaMode::kShifted)
        v_hist_.emplace_back(ord, hist.step(), opts_.history_window);
    }
  }
  for (std::size_t k = 0; k < sys_.n; ++k) {
    dalpha_[k].resize(j + 1);
    dalpha_[k][j] = q_hist_[k].evaluate(hist.q(k), j, v0_[static_cast<Eigen::Index>(k)]);
  }
}

Eigen::VectorXd ConstrainedSystem::accelerations(const TrajectoryHistory& hist) {
  const std::size_t j = hist.newest();
  if (!general_) {
    lambda_ = 0.0;
    return -sys_.potential.gradient(hist.q_at(j));
  }
  update_dalpha(hist);
  const auto n = static_cast<Eigen::Index>(sys_.n);
  const FracOrder& ord = general_->order;
  const double h = hist.step();
  const double t = hist.time(j);
  const ConstraintPoint x = point(hist, j);
  VectorXd d1(n);
  double sigma = 0.0;  // d(d1_k)/d(q''_k) in kDirect mode
  double correction = 0.0;
  if (mode() == D1DalphaMode::kDirect) {
    const double theta = hist.position_weight();
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      const auto qk = hist.q(kk);
      scratch_.assign(qk.begin(), qk.end());
      scratch_.push_back(x.q[k] + h * x.qdot[k]);
      const double ahead = q_hist_[kk].evaluate(scratch_, j + 1, v0_[k]);
      d1[k] = (ahead - dalpha_[kk][j]) / h;
      sigma = theta * h * q_hist_[kk].newest_weight(j + 1);
    }
  } else {
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      // shift correction averaged over the coming step keeps t = a finite
      const double shift = prop1_shift_average(ord, higher_[k], t, t + h, hist.t0());
      const double slope = ord.m() == 1 ? 0.0 : higher_[k];
      d1[k] = v_hist_[kk].evaluate(hist.v(kk), j, slope) + shift;
      correction = std::max(correction, std::abs(shift));
    }
  }
  diag_ = {j * sys_.n * 2, correction};

  try {
    const VectorXd gu = sys_.potential.gradient(x.q);
    const VectorXd fv = general_->d_qdot(x);
    const double fv2 = fv.squaredNorm();
    if (!(fv2 > kSingularGradient)) throw SingularConstraintError("");
    lambda_ = linear_ ? (linear_->a.dot(gu) - linear_->b.dot(d1)) / fv2
                      : lambda_general(sys_, x, FracRates{d1, {}});
    VectorXd acc = -gu + fv * lambda_;
    if (sigma != 0.0) {
      // d1 -> d1 + sigma acc; solve the resulting scalar equation for fdl.acc
      const VectorXd fdl = eval_or_zero(general_->d_dleft, x);
      const double denom = 1.0 + sigma * fdl.dot(fv) / fv2;
      if (!(std::abs(denom) > 1e-12))
        throw SingularConstraintError(dump("implicit fractional term is singular", t, x.q, x.qdot));
      const double gamma = fdl.dot(acc) / denom;
      lambda_ -= sigma * gamma / fv2;
      acc -= fv * (sigma * gamma / fv2);
    }
    return acc;
  } catch (const SingularConstraintError& e) {
    if (e.what()[0] != '\0') throw;
    throw SingularConstraintError(dump("vanishing Chetaev gradient df/dq'", t, x.q, x.qdot));
  }
}

std::optional<double> ConstrainedSystem::constraint_residual(const TrajectoryHistory& hist) {
  if (!general_) return {};
  return general_->f(point(hist, hist.newest()));
}

std::unique_ptr<ConstrainedSystem> rhs_general(const SystemSpec& sys, ConstrainedOptions opts) {
  SystemSpec s = sys;
  if (s.constraint && std::holds_alternative<LinearConstraint>(*s.constraint))
    s.constraint = to_general(std::get<LinearConstraint>(*s.constraint));
  return std::make_unique<ConstrainedSystem>(std::move(s), opts);
}

std::unique_ptr<ConstrainedSystem> rhs_linear(const SystemSpec& sys, ConstrainedOptions opts) {
  if (!sys.constraint || !std::holds_alternative<LinearConstraint>(*sys.constraint))
    throw DomainError("rhs_linear: system has no linear constraint");
  if (!(std::get<LinearConstraint>(*sys.constraint).a.squaredNorm() > 0.0))
    throw SingularConstraintError("linear constraint: a = 0");
  return std::make_unique<ConstrainedSystem>(sys, opts);
}

SimulationResult simulate(const SystemSpec& sys, const IntegratorConfig& cfg,
                          ConstrainedOptions opts) {
  ConstrainedSystem rhs(sys, opts);
  return integrate_second_order(rhs, sys.q_init, rhs.initial_velocity(), cfg);
}

Case2Coordinates twodim_case2_transform(double q1, double q2,
                                        std::function<double(double, double)> u) {
  return {0.5 * (q1 + q2), 0.5 * (q1 - q2),
          [u = std::move(u)](double x, double y) { return u(x + y, x - y); }};
}

std::pair<double, double> twodim_case2_inverse(double x, double y) { return {x + y, x - y}; }

NonlinearFracOscillator::NonlinearFracOscillator(double g, std::function<double(double)> K,
                                                 const FracOrder& order, Form form)
    : g_(g), K_(std::move(K)), order_(order), form_(form) {
  if (!(order.alpha() > 1.0 && order.alpha() < 2.0))
    throw DomainError("nonlinear fractional oscillator: order must lie in (1,2)");
  if (!K_) throw DomainError("nonlinear fractional oscillator: K missing");
}

Eigen::VectorXd NonlinearFracOscillator::accelerations(const TrajectoryHistory& hist) {
  const std::size_t j = hist.newest();
  const double h = hist.step();
  const auto x = hist.q(0);
  const double eps = order_.epsilon();
  VectorXd acc(1);
  if (form_ == Form::kReduced) {
    if (!eps_hist_) eps_hist_.emplace(FracOrder(eps), h);
    acc[0] = -g_ * eps_hist_->evaluate(x, j) - g_ * g_ * K_(x[j]);
    diag_ = {j, 0.0};
    return acc;
  }
  if (!alpha_hist_) {
    alpha_hist_.emplace(order_, h);
    jw_.emplace(eps, hist.capacity());
  }
  const double v0 = hist.v(0)[0];
  dalpha_.resize(j + 1);
  k_hist_.resize(j + 1);
  jk_.resize(j + 1);
  dalpha_[j] = alpha_hist_->evaluate(x, j, v0);
  k_hist_[j] = K_(x[j]);
  jk_[j] = kernels::fractional_integral_at(k_hist_, j, *jw_, h);

  // both D^1 terms look one step ahead along x_j + h x'_j (+ theta h^2 x'')
  const double ahead = x[j] + h * hist.v(0)[j];
  scratch_.assign(x.begin(), x.end());
  scratch_.push_back(ahead);
  const double d1_dalpha = (alpha_hist_->evaluate(scratch_, j + 1, v0) - dalpha_[j]) / h;
  const double sigma = hist.position_weight() * h * alpha_hist_->newest_weight(j + 1);
  if (jw_->n_max() < j + 1) jw_.emplace(eps, 2 * (j + 1));
  k_hist_.push_back(K_(ahead));
  const double d1_jk = (kernels::fractional_integral_at(k_hist_, j + 1, *jw_, h) - jk_[j]) / h;
  k_hist_.pop_back();
  const double denom = 1.0 + g_ * sigma;
  if (!(std::abs(denom) > 1e-12)) throw SingularConstraintError("pre-reduction form: singular step");
  acc[0] = (-g_ * d1_dalpha - g_ * d1_jk) / denom;
  diag_ = {3 * j, 0.0};
  return acc;
}

std::unique_ptr<NonlinearFracOscillator> rhs_nonlinear_frac_oscillator(
    double g, std::function<double(double)> K, const FracOrder& order,
    NonlinearFracOscillator::Form form) {
  return std::make_unique<NonlinearFracOscillator>(g, std::move(K), order, form);
}

HamiltonSpec HamiltonSpec::constant(const VectorXd& a, Potential u, const FracOrder& order,
                                    VectorXd q0, VectorXd p0) {
  HamiltonSpec s;
  s.n = static_cast<std::size_t>(a.size());
  s.potential = std::move(u);
  s.A = [a](const VectorXd&, const VectorXd&) { return a; };
  s.order = order;
  s.q_init = std::move(q0);
  s.p_init = std::move(p0);
  return s;
}

void HamiltonSpec::validate() const {
  const auto sz = static_cast<Eigen::Index>(n);
  if (n == 0) throw DomainError("hamilton: dimension must be positive");
  if (q_init.size() != sz || p_init.size() != sz)
    throw DomainError("hamilton: initial data must have length n");
  if (!A) throw DomainError("hamilton: A missing");
  order.require_fractional("hamilton");
  const VectorXd a0 = A(q_init, VectorXd::Zero(sz));
  if (a0.size() != sz) throw DomainError("hamilton: A must have length n");
  if (!(a0.squaredNorm() > 0.0)) throw SingularConstraintError("hamilton: A = 0");
}

namespace {

struct HamiltonKinematics {
  VectorXd A;
  VectorXd qdot;
  double mu;
};

HamiltonKinematics kinematics(const HamiltonSpec& s, const VectorXd& q, const VectorXd& p,
                              const VectorXd& dq) {
  HamiltonKinematics k;
  k.A = s.A(q, dq);
  const double a2 = k.A.squaredNorm();
  if (!(a2 > kSingularGradient))
    throw SingularConstraintError(dump("hamilton: A^2 vanished", kNaN, q, p));
  k.mu = k.A.dot(p) / a2;
  k.qdot = p - k.mu * k.A;
  return k;
}

// integrand mu sum_l dA_l/d(D^alpha q_k) q'_l of the fractional momentum term
VectorXd frac_integrand(const HamiltonSpec& s, const HamiltonKinematics& k, const VectorXd& q,
                        const VectorXd& dq) {
  if (!s.dA_dd) return VectorXd::Zero(q.size());
  return k.mu * (s.dA_dd(q, dq).transpose() * k.qdot);
}

}  // namespace

HamiltonRates hamilton_rhs(const HamiltonSpec& spec, const VectorXd& q, const VectorXd& p,
                           const VectorXd& dalpha_q, const VectorXd& frac_term) {
  const HamiltonKinematics k = kinematics(spec, q, p, dalpha_q);
  VectorXd pdot = -spec.potential.gradient(q);
  if (spec.dA_dq) pdot += k.mu * (spec.dA_dq(q, dalpha_q).transpose() * k.qdot);
  if (frac_term.size() > 0) pdot += frac_term;
  return {k.qdot, pdot, k.mu};
}

SimulationResult integrate_hamilton(const HamiltonSpec& spec, const IntegratorConfig& cfg) {
  spec.validate();
  cfg.validate();
  if (cfg.scheme == Scheme::kAbmFractional)
    throw DomainError("integrate_hamilton: scheme must be semi-implicit-euler or velocity-verlet");
  const Grid grid = cfg.grid();
  const double h = grid.step();
  const std::size_t n = spec.n;
  const std::size_t N = grid.size();

  std::vector<std::vector<double>> qh(n), wh(n);
  std::vector<CaputoHistory> dq_hist, w_hist;
  for (std::size_t k = 0; k < n; ++k) {
    qh[k].reserve(N);
    wh[k].reserve(N);
    dq_hist.emplace_back(spec.order, h, cfg.history_window);
    w_hist.emplace_back(spec.order, h, cfg.history_window);
  }
  VectorXd v0;

  // D^alpha q and the fractional momentum term at node j with momentum p
  auto dalpha_q = [&](std::size_t j) {
    VectorXd d(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k)
      d[static_cast<Eigen::Index>(k)] = dq_hist[k].evaluate(qh[k], j, v0[static_cast<Eigen::Index>(k)]);
    return d;
  };
  auto rates = [&](std::size_t j, const VectorXd& q, const VectorXd& p, const VectorXd& dq) {
    const HamiltonKinematics kin = kinematics(spec, q, p, dq);
    const VectorXd w = frac_integrand(spec, kin, q, dq);
    VectorXd frac(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
      wh[k].resize(j + 1);
      wh[k][j] = w[static_cast<Eigen::Index>(k)];
      frac[static_cast<Eigen::Index>(k)] = w_hist[k].evaluate(wh[k], j);
    }
    return hamilton_rhs(spec, q, p, dq, frac);
  };

  SimulationResult res;
  res.grid = grid;
  res.scheme = cfg.scheme;
  res.h = h;
  VectorXd q = spec.q_init, p = spec.p_init;
  for (std::size_t k = 0; k < n; ++k) qh[k].push_back(q[static_cast<Eigen::Index>(k)]);
  VectorXd dq = VectorXd::Zero(static_cast<Eigen::Index>(n));
  v0 = kinematics(spec, q, p, dq).qdot;
  HamiltonRates r = rates(0, q, p, dq);

  auto record = [&](const HamiltonRates& rr, const VectorXd& qq, const VectorXd& pp,
                    const VectorXd& d) {
    res.q.push_back(qq);
    res.qdot.push_back(rr.qdot);
    res.p.push_back(pp);
    res.multiplier.push_back(rr.mu);
    res.constraint_residual.push_back(spec.A(qq, d).dot(rr.qdot));
    res.diagnostics.push_back({2 * n * (res.q.size() - 1), 0.0});
  };
  record(r, q, p, dq);

  for (std::size_t j = 0; j < grid.n_steps(); ++j) {
    VectorXd q1;
    if (cfg.scheme == Scheme::kSemiImplicitEuler) {
      p = p + h * r.pdot;
      q1 = q + h * kinematics(spec, q, p, dq).qdot;
    } else {
      const VectorXd p_half = p + 0.5 * h * r.pdot;
      q1 = q + h * kinematics(spec, q, p_half, dq).qdot;
      for (std::size_t k = 0; k < n; ++k) qh[k].push_back(q1[static_cast<Eigen::Index>(k)]);
      const VectorXd dq1 = dalpha_q(j + 1);
      p = p_half + 0.5 * h * rates(j + 1, q1, p_half, dq1).pdot;
      for (std::size_t k = 0; k < n; ++k) qh[k].pop_back();
    }
    q = q1;
    for (std::size_t k = 0; k < n; ++k) qh[k].push_back(q[static_cast<Eigen::Index>(k)]);
    dq = dalpha_q(j + 1);
    r = rates(j + 1, q, p, dq);
    bool bad = false;
    for (Eigen::Index i = 0; i < q.size(); ++i)
      bad = bad || !std::isfinite(q[i]) || !std::isfinite(p[i]) ||
            std::abs(q[i]) > cfg.divergence_threshold || std::abs(p[i]) > cfg.divergence_threshold;
    if (bad) {
      if (res.q.size() >= 2) res.grid = Grid(grid.t_start(), grid.node(res.q.size() - 1), res.q.size() - 1);
      throw SimulationDivergence("state exceeded the divergence threshold", grid.node(j + 1), j + 1,
                                 std::move(res));
    }
    record(r, q, p, dq);
  }
  return res;
}

namespace {

SampleSeries right_caputo_from_samples(const SampleSeries& f, const FracOrder& ord) {
  return caputo_right(differentiate(f, ord.m()), ord);
}

}  // namespace

VariationalReport variational_residual(const SimulationResult& traj, const SampleSeries& mu,
                                       const SystemSpec& sys) {
  const Grid& grid = traj.grid;
  const std::size_t N = grid.size();
  if (traj.q.size() != N || !(mu.grid() == grid))
    throw DomainError("variational_residual: trajectory and multiplier grids differ");
  if (traj.dim() != sys.n) throw DomainError("variational_residual: dimension mismatch");
  const std::size_t n = sys.n;

  std::vector<SampleSeries> qk, qddot;
  for (std::size_t k = 0; k < n; ++k) {
    qk.push_back(traj.position(k));
    qddot.push_back(traj.qdot.size() == N ? differentiate(traj.velocity(k))
                                          : differentiate(qk.back(), 2));
  }

  std::vector<std::vector<double>> res(n, std::vector<double>(N, kNaN));
  std::vector<double> bracket(N, kNaN);
  std::vector<std::vector<double>> B(n, std::vector<double>(N, 0.0));
  std::vector<std::vector<double>> FV(n, std::vector<double>(N, 0.0));

  if (sys.constraint) {
    const GeneralConstraint g = std::holds_alternative<GeneralConstraint>(*sys.constraint)
                                    ? std::get<GeneralConstraint>(*sys.constraint)
                                    : to_general(std::get<LinearConstraint>(*sys.constraint));
    const FracOrder& ord = g.order;
    std::vector<SampleSeries> dl, dr;
    for (std::size_t k = 0; k < n; ++k) {
      dl.push_back(caputo_left_from_samples(qk[k], ord));
      dr.push_back(right_caputo_from_samples(qk[k], ord));
    }
    std::vector<std::vector<double>> mfl(n, std::vector<double>(N)), mfr = mfl, mfv = mfl, mfq = mfl;
    const auto sz = static_cast<Eigen::Index>(n);
    for (std::size_t j = 0; j < N; ++j) {
      ConstraintPoint x{traj.q[j], traj.qdot.size() == N ? traj.qdot[j] : VectorXd::Zero(sz),
                        VectorXd(sz), VectorXd(sz)};
      for (std::size_t k = 0; k < n; ++k) {
        x.d_left[static_cast<Eigen::Index>(k)] = dl[k][j];
        x.d_right[static_cast<Eigen::Index>(k)] = dr[k][j];
      }
      const VectorXd fq = eval_or_zero(g.d_q, x), fv = g.d_qdot(x);
      const VectorXd fl = eval_or_zero(g.d_dleft, x), fr = eval_or_zero(g.d_dright, x);
      for (std::size_t k = 0; k < n; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        mfq[k][j] = mu[j] * fq[kk];
        mfv[k][j] = mu[j] * fv[kk];
        mfl[k][j] = mu[j] * fl[kk];
        mfr[k][j] = mu[j] * fr[kk];
        FV[k][j] = fv[kk];
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      const auto left = caputo_left_from_samples(SampleSeries(grid, mfl[k]), ord);
      const auto right = right_caputo_from_samples(SampleSeries(grid, mfr[k]), ord);
      const auto dmfv = differentiate(SampleSeries(grid, mfv[k]));
      for (std::size_t j = 0; j < N; ++j)
        B[k][j] = mfq[k][j] + left[j] + right[j] - dmfv[j];
    }
  }

  for (std::size_t j = 1; j + 1 < N; ++j) {
    const VectorXd gu = sys.potential.gradient(traj.q[j]);
    VectorXd b(static_cast<Eigen::Index>(n)), fv(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      res[k][j] = -gu[kk] - qddot[k][j] + B[k][j];
      b[kk] = B[k][j];
      fv[kk] = FV[k][j];
    }
    const double f2 = fv.squaredNorm();
    bracket[j] = (f2 > 0.0 ? (b - fv * (fv.dot(b) / f2)).eval() : b).norm();
  }

  VariationalReport rep{{}, SampleSeries(grid, std::move(bracket))};
  for (std::size_t k = 0; k < n; ++k) rep.residual.emplace_back(grid, std::move(res[k]));
  return rep;
}

}  // namespace fracdyn
