#include "fracdyn/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <set>
#include <sstream>

#include "fracdyn/constrained_dynamics.hpp"
#include "fracdyn/oscillator_exact.hpp"

namespace fracdyn {

using json = nlohmann::json;
using Eigen::VectorXd;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

VectorXd vec(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

bool is_second_order_scheme(Scheme s) { return s != Scheme::kAbmFractional; }

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

void require_length(const std::vector<double>& v, std::size_t n, const std::string& key) {
  require(v.size() == n, key, "expected " + std::to_string(n) + " entries, got " +
                                  std::to_string(v.size()));
  for (double x : v) require(std::isfinite(x), key, "entries must be finite");
}

}  // namespace

const std::vector<std::string>& scenario_ids() {
  static const std::vector<std::string> ids = {
      "oscillator-1d", "linear-nd",         "case1-2d",        "case1-2d-b2zero",
      "case2-2d",      "nonlinear-fracosc", "hamilton-linear", "custom"};
  return ids;
}

ScenarioConfig default_config(const std::string& scenario) {
  ScenarioConfig c;
  c.scenario = scenario;
  c.h = 1.0 / 1024;
  c.t_end = 10.0;
  if (scenario == "oscillator-1d") {
    c.alpha = 2.5;
    c.scheme = Scheme::kAbmFractional;
    c.potential = {"zero", {}, {}};
    c.q0 = {1.0};
    c.qdot0 = {0.0};
  } else if (scenario == "linear-nd") {
    c.alpha = 0.5;
    c.a = {1.0, 0.5};
    c.b = {0.3, 0.2};
    c.potential = {"quadratic", {1.0, 2.0}, {}};
    c.q0 = {1.0, 0.75};
    c.qdot0 = {0.0, 0.0};
  } else if (scenario == "case1-2d") {
    c.alpha = 0.5;
    c.a = {0.0, 1.0};
    c.b = {0.3, 0.2};
    c.potential = {"quadratic", {1.0, 1.0}, {}};
    c.q0 = {1.0, 0.5};
    c.qdot0 = {0.0, 0.0};
  } else if (scenario == "case1-2d-b2zero") {
    c.alpha = 0.5;
    c.a = {0.0, 1.0};
    c.b = {0.3, 0.0};
    c.potential = {"quadratic", {1.0, 0.0}, {}};
    c.q0 = {1.0, 0.0};
    c.qdot0 = {0.0, 0.0};
  } else if (scenario == "case2-2d") {
    c.alpha = 0.5;
    c.a = {1.0, 1.0};
    c.b = {0.0, 0.5};
    c.potential = {"quadratic", {1.0, 1.0}, {}};
    c.q0 = {1.0, 0.2};
    c.qdot0 = {0.0, 0.0};
  } else if (scenario == "nonlinear-fracosc") {
    c.alpha = 1.5;
    c.t_end = 5.0;
    c.potential = {"zero", {}, {}};
    c.q0 = {1.0};
    c.qdot0 = {0.0};
  } else if (scenario == "hamilton-linear") {
    c.alpha = 0.5;
    c.a = {1.0, 0.0};
    c.potential = {"quadratic", {1.0, 1.0}, {}};
    c.q0 = {0.0, 1.0};
    c.qdot0 = {0.0, 0.0};
    c.p0 = {0.0, 0.0};
  } else if (scenario == "custom") {
    c.alpha = 0.5;
    c.a = {1.0, 1.0, 1.0};
    c.b = {0.2, 0.1, 0.3};
    c.potential = {"quadratic", {1.0, 2.0, 3.0}, {}};
    c.q0 = {1.0, 0.0, -1.0};
    c.qdot0 = {0.0, 0.0, 0.0};
  } else {
    throw ConfigError("scenario", "unknown scenario '" + scenario + "'");
  }
  return c;
}

std::size_t ScenarioConfig::dim() const { return q0.size(); }

void ScenarioConfig::validate() const {
  const auto& ids = scenario_ids();
  require(std::find(ids.begin(), ids.end(), scenario) != ids.end(), "scenario",
          "unknown scenario '" + scenario + "'");
  require(std::isfinite(h) && h > 0.0, "grid.h", "must be positive");
  require(std::isfinite(t_end) && t_end > 0.0, "grid.t_end", "must be positive");
  require(h <= t_end, "grid.h", "must not exceed grid.t_end");
  require(t_end / h <= 5e7, "grid.h", "too many steps");
  require(!history_window || *history_window >= 10, "grid.history_window",
          "must be at least 10 steps");
  require(std::isfinite(tolerance) && tolerance > 0.0, "tolerance", "must be positive");
  require(d1dalpha == "auto" || d1dalpha == "direct" || d1dalpha == "shifted",
          "parameters.d1dalpha", "must be auto, direct or shifted");
  require(!file_stem().empty() && file_stem().find('/') == std::string::npos, "output.stem",
          "must be a plain file name");
  require(std::isfinite(alpha), "parameters.alpha", "must be finite");

  const std::size_t n = q0.size();
  require(n >= 1, "initial.q0", "must not be empty");
  require_length(q0, n, "initial.q0");
  require_length(qdot0, n, "initial.qdot0");
  if (higher) require_length(*higher, n, "initial.higher");

  require(potential.kind == "zero" || potential.kind == "quadratic" || potential.kind == "quartic",
          "parameters.potential.kind", "must be zero, quadratic or quartic");
  if (potential.kind != "zero") require_length(potential.k, n, "parameters.potential.k");
  if (potential.kind == "quartic") require_length(potential.c, n, "parameters.potential.c");

  if (scenario == "oscillator-1d") {
    require(alpha > 2.0 && alpha < 3.0, "parameters.alpha", "oscillator order must lie in (2,3)");
    require(std::isfinite(omega2) && omega2 > 0.0, "parameters.omega2", "must be positive");
    require(n == 1, "initial.q0", "oscillator-1d is one-dimensional");
    require(path == "oscillator" || path == "constraint", "parameters.path",
            "must be oscillator or constraint");
    if (path == "oscillator")
      require(scheme == Scheme::kAbmFractional, "grid.scheme",
              "the oscillator path runs abm-fractional");
    else
      require(is_second_order_scheme(scheme), "grid.scheme",
              "the constraint path needs semi-implicit-euler or velocity-verlet");
    return;
  }
  require(is_second_order_scheme(scheme), "grid.scheme",
          "must be semi-implicit-euler or velocity-verlet");
  if (scenario == "nonlinear-fracosc") {
    require(alpha > 1.0 && alpha < 2.0, "parameters.alpha", "must lie in (1,2)");
    require(std::isfinite(g) && g > 0.0, "parameters.g", "must be positive");
    require(n == 1, "initial.q0", "nonlinear-fracosc is one-dimensional");
    require(K.kind == "linear" || K.kind == "cubic" || K.kind == "sine", "parameters.K.kind",
            "must be linear, cubic or sine");
    require(std::isfinite(K.c), "parameters.K.c", "must be finite");
    require(form == "reduced" || form == "pre-reduction", "parameters.form",
            "must be reduced or pre-reduction");
    return;
  }
  require(alpha > 0.0 && alpha < 2.0 && alpha != 1.0, "parameters.alpha",
          "constraint order must lie in (0,1) or (1,2)");
  require_length(a, n, "parameters.a");
  double a2 = 0.0;
  for (double x : a) a2 += x * x;
  require(a2 > 0.0, "parameters.a", "must not be the zero vector");
  if (scenario == "hamilton-linear") {
    require(p0.empty() || p0.size() == n, "initial.p0",
            "expected " + std::to_string(n) + " entries");
    return;
  }
  require_length(b, n, "parameters.b");
  if (scenario == "linear-nd") require(n >= 2, "initial.q0", "linear-nd needs n >= 2");
  if (scenario.rfind("case", 0) == 0) require(n == 2, "initial.q0", "two-dimensional scenario");
  if (scenario == "case1-2d" || scenario == "case1-2d-b2zero")
    require(a[0] == 0.0, "parameters.a", "case 1 requires a_1 = 0");
  if (scenario == "case1-2d-b2zero") require(b[1] == 0.0, "parameters.b", "requires b_2 = 0");
  if (scenario == "case2-2d") {
    require(b[0] == 0.0, "parameters.b", "case 2 requires b_1 = 0");
    require(a[0] == a[1], "parameters.a", "case 2 requires a_1 = a_2");
  }
}

namespace {

json to_json(const ScenarioConfig& c) {
  json j;
  j["scenario"] = c.scenario;
  j["parameters"] = {{"alpha", c.alpha},
                     {"a", c.a},
                     {"b", c.b},
                     {"omega2", c.omega2},
                     {"g", c.g},
                     {"potential", {{"kind", c.potential.kind}, {"k", c.potential.k}, {"c", c.potential.c}}},
                     {"K", {{"kind", c.K.kind}, {"c", c.K.c}}},
                     {"path", c.path},
                     {"form", c.form},
                     {"d1dalpha", c.d1dalpha},
                     {"project_initial", c.project_initial}};
  j["parameters"]["C1"] = c.c1 ? json(*c.c1) : json(nullptr);
  j["parameters"]["C2"] = c.c2 ? json(*c.c2) : json(nullptr);
  j["grid"] = {{"h", c.h}, {"t_end", c.t_end}, {"scheme", to_string(c.scheme)}};
  j["grid"]["history_window"] = c.history_window ? json(*c.history_window) : json(nullptr);
  j["initial"] = {{"q0", c.q0}, {"qdot0", c.qdot0}, {"p0", c.p0}};
  j["initial"]["higher"] = c.higher ? json(*c.higher) : json(nullptr);
  j["tolerance"] = c.tolerance;
  j["output"] = {{"dir", c.out_dir}, {"stem", c.stem}};
  j["seed"] = c.seed;
  return j;
}

template <class T>
void read(const json& obj, const char* name, const std::string& prefix, T& out,
          std::set<std::string>& seen) {
  seen.insert(name);
  if (!obj.contains(name)) return;
  const std::string key = prefix.empty() ? name : prefix + "." + name;
  try {
    out = obj.at(name).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(key, "has the wrong type");
  }
}

void read_optional(const json& obj, const char* name, const std::string& prefix,
                   std::optional<double>& out, std::set<std::string>& seen) {
  seen.insert(name);
  if (!obj.contains(name) || obj.at(name).is_null()) return;
  if (!obj.at(name).is_number()) throw ConfigError(prefix + "." + name, "has the wrong type");
  out = obj.at(name).get<double>();
}

void reject_unknown(const json& obj, const std::set<std::string>& seen, const std::string& prefix) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!seen.count(it.key()))
      throw ConfigError(prefix.empty() ? it.key() : prefix + "." + it.key(), "unknown key");
}

const json& section(const json& root, const char* name, const std::string& prefix,
                    std::set<std::string>& seen) {
  static const json empty = json::object();
  seen.insert(name);
  if (!root.contains(name)) return empty;
  const json& s = root.at(name);
  if (!s.is_object())
    throw ConfigError(prefix.empty() ? name : prefix + "." + name, "must be an object");
  return s;
}

}  // namespace

std::string serialize_config(const ScenarioConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

ScenarioConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("<document>", "top level must be an object");
  if (!root.contains("scenario") || !root.at("scenario").is_string())
    throw ConfigError("scenario", "missing or not a string");
  ScenarioConfig c = default_config(root.at("scenario").get<std::string>());

  std::set<std::string> top{"scenario"};
  const json& par = section(root, "parameters", "", top);
  std::set<std::string> ps;
  read(par, "alpha", "parameters", c.alpha, ps);
  read(par, "a", "parameters", c.a, ps);
  read(par, "b", "parameters", c.b, ps);
  read(par, "omega2", "parameters", c.omega2, ps);
  read_optional(par, "C1", "parameters", c.c1, ps);
  read_optional(par, "C2", "parameters", c.c2, ps);
  read(par, "g", "parameters", c.g, ps);
  read(par, "path", "parameters", c.path, ps);
  read(par, "form", "parameters", c.form, ps);
  read(par, "d1dalpha", "parameters", c.d1dalpha, ps);
  read(par, "project_initial", "parameters", c.project_initial, ps);
  {
    const json& pot = section(par, "potential", "parameters", ps);
    std::set<std::string> s;
    read(pot, "kind", "parameters.potential", c.potential.kind, s);
    read(pot, "k", "parameters.potential", c.potential.k, s);
    read(pot, "c", "parameters.potential", c.potential.c, s);
    reject_unknown(pot, s, "parameters.potential");
    const json& k = section(par, "K", "parameters", ps);
    s.clear();
    read(k, "kind", "parameters.K", c.K.kind, s);
    read(k, "c", "parameters.K", c.K.c, s);
    reject_unknown(k, s, "parameters.K");
  }
  reject_unknown(par, ps, "parameters");

  const json& grid = section(root, "grid", "", top);
  std::set<std::string> gs;
  read(grid, "h", "grid", c.h, gs);
  read(grid, "t_end", "grid", c.t_end, gs);
  std::string scheme = to_string(c.scheme);
  read(grid, "scheme", "grid", scheme, gs);
  try {
    c.scheme = scheme_from_string(scheme);
  } catch (const DomainError&) {
    throw ConfigError("grid.scheme", "unknown scheme '" + scheme + "'");
  }
  gs.insert("history_window");
  if (grid.contains("history_window") && !grid.at("history_window").is_null()) {
    const json& w = grid.at("history_window");
    if (!w.is_number_integer() || w.get<long long>() < 0)
      throw ConfigError("grid.history_window", "must be a non-negative integer or null");
    c.history_window = w.get<std::size_t>();
  }
  reject_unknown(grid, gs, "grid");

  const json& init = section(root, "initial", "", top);
  std::set<std::string> is;
  read(init, "q0", "initial", c.q0, is);
  read(init, "qdot0", "initial", c.qdot0, is);
  read(init, "p0", "initial", c.p0, is);
  is.insert("higher");
  if (init.contains("higher") && !init.at("higher").is_null()) {
    std::vector<double> hv;
    std::set<std::string> tmp;
    read(init, "higher", "initial", hv, tmp);
    c.higher = hv;
  }
  reject_unknown(init, is, "initial");

  read(root, "tolerance", "", c.tolerance, top);
  read(root, "seed", "", c.seed, top);
  const json& out = section(root, "output", "", top);
  std::set<std::string> os;
  read(out, "dir", "output", c.out_dir, os);
  read(out, "stem", "output", c.stem, os);
  reject_unknown(out, os, "output");
  reject_unknown(root, top, "");

  c.validate();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("--config", "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

Potential make_potential(const PotentialConfig& p) {
  if (p.kind == "zero") return Potential::zero();
  if (p.kind == "quadratic") return Potential::quadratic(vec(p.k));
  const VectorXd k = vec(p.k), c = vec(p.c);
  return {[k, c](const VectorXd& q) {
            return (0.5 * k.array() * q.array().square() + 0.25 * c.array() * q.array().pow(4)).sum();
          },
          [k, c](const VectorXd& q) {
            return (k.array() * q.array() + c.array() * q.array().cube()).matrix().eval();
          }};
}

std::function<double(double)> make_K(const KConfig& k) {
  if (k.kind == "linear") return [](double x) { return x; };
  if (k.kind == "cubic") return [c = k.c](double x) { return x + c * x * x * x; };
  return [](double x) { return std::sin(x); };
}

IntegratorConfig integrator(const ScenarioConfig& c) {
  return {c.h, c.t_end, c.scheme, c.history_window, 1e12};
}

ConstrainedOptions constrained_options(const ScenarioConfig& c) {
  ConstrainedOptions o;
  if (c.d1dalpha == "direct") o.mode = D1DalphaMode::kDirect;
  if (c.d1dalpha == "shifted") o.mode = D1DalphaMode::kShifted;
  o.history_window = c.history_window;
  o.project_initial = c.project_initial;
  return o;
}

SystemSpec linear_system(const ScenarioConfig& c, const VectorXd& a, const VectorXd& b,
                         double order) {
  SystemSpec s;
  s.n = c.dim();
  s.potential = make_potential(c.potential);
  s.constraint = LinearConstraint{a, b, FracOrder(order)};
  s.q_init = vec(c.q0);
  s.qdot_init = vec(c.qdot0);
  if (c.higher) s.higher_init = vec(*c.higher);
  return s;
}

SimulationResult run_constrained(const ScenarioConfig& c, const SystemSpec& sys) {
  try {
    return simulate(sys, integrator(c), constrained_options(c));
  } catch (const ConstraintViolationError& e) {
    throw ConfigError("initial.qdot0", e.what());
  }
}

OscillatorSpec oscillator_of(const ScenarioConfig& c) {
  auto spec = OscillatorSpec::from_initial_data(c.alpha, c.omega2, c.q0[0], c.qdot0[0]);
  if (c.c1) spec.c1 = *c.c1;
  if (c.c2) spec.c2 = *c.c2;
  return spec;
}

SimulationResult run_oscillator(const ScenarioConfig& c) {
  const OscillatorSpec spec = oscillator_of(c);
  if (c.path == "constraint") {
    // 1D constraint omega2 q' + D^{alpha-1} q = 0
    return run_constrained(c, linear_system(c, VectorXd::Constant(1, c.omega2),
                                            VectorXd::Constant(1, 1.0), c.alpha - 1.0));
  }
  const double init[] = {c.q0[0], c.qdot0[0]};
  SimulationResult r = integrate_fractional_abm(
      spec.derivative_order(),
      [spec](double t, double x) { return forcing(spec, t) - spec.omega2 * x; }, init, integrator(c));
  const SampleSeries v = differentiate(r.position(0));
  r.qdot.reserve(r.q.size());
  for (std::size_t j = 0; j < r.q.size(); ++j) r.qdot.push_back(VectorXd::Constant(1, v[j]));
  r.multiplier.assign(r.q.size(), 0.0);
  return r;
}

SimulationResult run_hamilton(const ScenarioConfig& c) {
  const VectorXd p0 = c.p0.empty() ? vec(c.qdot0) : vec(c.p0);
  return integrate_hamilton(HamiltonSpec::constant(vec(c.a), make_potential(c.potential),
                                                   FracOrder(c.alpha), vec(c.q0), p0),
                            integrator(c));
}

SimulationResult run_nonlinear(const ScenarioConfig& c) {
  NonlinearFracOscillator sys(c.g, make_K(c.K), FracOrder(c.alpha),
                              c.form == "reduced" ? NonlinearFracOscillator::Form::kReduced
                                                  : NonlinearFracOscillator::Form::kPreReduction);
  return integrate_second_order(sys, vec(c.q0), vec(c.qdot0), integrator(c));
}

SimulationResult simulate_scenario(const ScenarioConfig& c) {
  if (c.scenario == "oscillator-1d") return run_oscillator(c);
  if (c.scenario == "hamilton-linear") return run_hamilton(c);
  if (c.scenario == "nonlinear-fracosc") return run_nonlinear(c);
  return run_constrained(c, linear_system(c, vec(c.a), vec(c.b), c.alpha));
}

using Rows = std::vector<std::vector<double>>;

Rows compare(const Grid& grid, const SampleSeries& num, const std::function<double(std::size_t)>& ref) {
  Rows rows;
  rows.reserve(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double r = ref(j);
    rows.push_back({grid.node(j), num[j], r, std::abs(num[j] - r)});
  }
  return rows;
}

}  // namespace

ScenarioOutcome run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioOutcome out;
  out.result = simulate_scenario(cfg);
  const SimulationResult& r = out.result;
  const Grid& grid = r.grid;

  if (cfg.scenario == "oscillator-1d") {
    const SampleSeries exact = exact_solution(oscillator_of(cfg), grid);
    out.comparison = compare(grid, r.position(0), [&](std::size_t j) { return exact[j]; });
    out.comparison_header = {"t", "q_numerical", "q_exact", "abs_error"};
  } else if (cfg.scenario == "case1-2d-b2zero" && cfg.potential.kind != "quartic") {
    // q_1 obeys the unconstrained classical equation
    const double k = cfg.potential.kind == "zero" ? 0.0 : cfg.potential.k[0];
    const double x0 = cfg.q0[0], v0 = cfg.qdot0[0];
    auto classical = [=](double t) {
      if (k > 0.0) return x0 * std::cos(std::sqrt(k) * t) + v0 / std::sqrt(k) * std::sin(std::sqrt(k) * t);
      if (k < 0.0) return x0 * std::cosh(std::sqrt(-k) * t) + v0 / std::sqrt(-k) * std::sinh(std::sqrt(-k) * t);
      return x0 + v0 * t;
    };
    out.comparison = compare(grid, r.position(0), [&](std::size_t j) { return classical(grid.node(j)); });
    out.comparison_header = {"t", "q_1_numerical", "q_1_classical", "abs_error"};
  } else if (cfg.scenario == "hamilton-linear") {
    // Lagrange form with the same constant constraint and b = 0
    ScenarioConfig lag = cfg;
    lag.b.assign(cfg.dim(), 0.0);
    lag.qdot0.resize(cfg.dim());
    const SystemSpec sys = linear_system(lag, vec(cfg.a), vec(lag.b), cfg.alpha);
    const VectorXd p0 = cfg.p0.empty() ? vec(cfg.qdot0) : vec(cfg.p0);
    SystemSpec s = sys;
    s.qdot_init = projector(vec(cfg.a)) * p0;
    const SimulationResult L = run_constrained(cfg, s);
    const std::size_t k = cfg.dim() - 1;
    out.comparison = compare(grid, r.position(k), [&](std::size_t j) { return L.q[j][static_cast<Eigen::Index>(k)]; });
    out.comparison_header = {"t", "q_n_hamilton", "q_n_lagrange", "abs_error"};
  }
  if (out.comparison)
    for (const auto& row : *out.comparison) out.max_abs_error = std::max(out.max_abs_error, row[3]);
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

namespace {

void write_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
               const Rows& rows) {
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write '" + file.string() + "'");
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
  if (!os) throw std::runtime_error("failed writing '" + file.string() + "'");
}

json vector_json(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

}  // namespace

RunArtifacts write_artifacts(const ScenarioConfig& cfg, const ScenarioOutcome& out,
                             const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const SimulationResult& r = out.result;
  const std::size_t n = r.dim();
  RunArtifacts art;
  const std::string stem = cfg.file_stem();

  std::vector<std::string> header{"t"};
  for (std::size_t k = 1; k <= n; ++k) header.push_back("q_" + std::to_string(k));
  for (std::size_t k = 1; k <= n; ++k) header.push_back("qdot_" + std::to_string(k));
  header.push_back("lambda");
  header.push_back("constraint_residual");
  Rows rows;
  rows.reserve(r.q.size());
  for (std::size_t j = 0; j < r.q.size(); ++j) {
    std::vector<double> row{r.grid.node(j)};
    for (std::size_t k = 0; k < n; ++k) row.push_back(r.q[j][static_cast<Eigen::Index>(k)]);
    for (std::size_t k = 0; k < n; ++k)
      row.push_back(j < r.qdot.size() ? r.qdot[j][static_cast<Eigen::Index>(k)] : kNaN);
    row.push_back(j < r.multiplier.size() ? r.multiplier[j] : 0.0);
    row.push_back(j < r.constraint_residual.size() ? r.constraint_residual[j] : kNaN);
    rows.push_back(std::move(row));
  }
  art.trajectory = dir / (stem + "_trajectory.csv");
  write_csv(art.trajectory, header, rows);

  if (out.comparison) {
    art.comparison = dir / (stem + "_comparison.csv");
    write_csv(*art.comparison, out.comparison_header, *out.comparison);
  }

  json s;
  s["scenario"] = cfg.scenario;
  s["scheme"] = to_string(r.scheme);
  s["h"] = r.h;
  s["t_end"] = r.grid.t_end();
  s["n"] = n;
  s["steps"] = r.grid.n_steps();
  s["max_abs_residual"] = r.constraint_residual.empty() ? json(nullptr) : json(r.max_abs_residual());
  s["final_state"] = {{"t", r.grid.t_end()}, {"q", vector_json(r.q.back())}};
  s["final_state"]["qdot"] = r.qdot.empty() ? json(nullptr) : vector_json(r.qdot.back());
  s["history_terms"] = r.total_history_terms();
  if (out.comparison) {
    s["max_abs_error"] = out.max_abs_error;
    s["tolerance"] = cfg.tolerance;
    s["within_tolerance"] = out.max_abs_error <= cfg.tolerance;
  }
  s["wall_time_seconds"] = out.wall_seconds;
  art.summary = dir / (stem + "_summary.json");
  std::ofstream os(art.summary, std::ios::binary | std::ios::trunc);
  os << s.dump(2) << '\n';
  if (!os) throw std::runtime_error("failed writing '" + art.summary.string() + "'");
  return art;
}

std::vector<double> parse_ladder(const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    double v = kNaN;
    try {
      std::size_t pos = 0;
      const auto slash = item.find('/');
      if (slash != std::string::npos) {
        const double num = std::stod(item.substr(0, slash), &pos);
        const double den = std::stod(item.substr(slash + 1));
        v = num / den;
      } else {
        v = std::stod(item, &pos);
        if (pos != item.size()) v = kNaN;
      }
    } catch (const std::exception&) {
      v = kNaN;
    }
    if (!(std::isfinite(v) && v > 0.0)) throw ConfigError("--ladder", "bad step '" + item + "'");
    out.push_back(v);
  }
  if (out.size() < 3) throw ConfigError("--ladder", "ladder must have >= 3 rungs");
  return out;
}

ConvergenceTable scenario_convergence(const ScenarioConfig& cfg, std::span<const double> ladder) {
  if (ladder.size() < 3) throw ConfigError("--ladder", "ladder must have >= 3 rungs");
  cfg.validate();
  for (double h : ladder)
    if (!(h > 0.0 && h <= cfg.t_end)) throw ConfigError("--ladder", "steps must lie in (0, t_end]");

  std::function<double(const SimulationResult&)> error;
  SimulationResult reference;
  if (cfg.scenario == "oscillator-1d") {
    const OscillatorSpec spec = oscillator_of(cfg);
    error = [spec](const SimulationResult& r) {
      return sup_distance(r.position(0), exact_solution(spec, r.grid), r.grid.t_start(), r.grid.t_end());
    };
  } else {
    ScenarioConfig ref = cfg;
    ref.h = *std::min_element(ladder.begin(), ladder.end()) / 4.0;
    reference = simulate_scenario(ref);
    error = [&reference](const SimulationResult& r) {
      const double ratio = r.h / reference.h;
      const auto stride = static_cast<std::size_t>(std::llround(ratio));
      if (std::abs(ratio - static_cast<double>(stride)) > 1e-9 * ratio)
        throw ConfigError("--ladder", "steps must be integer multiples of the reference step");
      double e = 0.0;
      for (std::size_t j = 0; j < r.q.size() && j * stride < reference.q.size(); ++j)
        e = std::max(e, (r.q[j] - reference.q[j * stride]).cwiseAbs().maxCoeff());
      return e;
    };
  }

  ConvergenceTable table;
  table.problem = cfg.scenario;
  for (double h : ladder) {
    ScenarioConfig c = cfg;
    c.h = h;
    const double e = error(simulate_scenario(c));
    double order = kNaN;
    if (!table.rows.empty()) {
      const auto& prev = table.rows.back();
      order = std::log(prev.error / e) / std::log(prev.h / h);
      if (!(e < prev.error)) table.monotone = false;
    }
    table.rows.push_back({h, e, order});
  }
  return table;
}

void write_convergence_csv(const ConvergenceTable& table, const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  Rows rows;
  for (const auto& r : table.rows) rows.push_back({r.h, r.error, r.order});
  write_csv(file, {"h", "error", "order"}, rows);
}

}  // namespace fracdyn
