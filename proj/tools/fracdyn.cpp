#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "fracdyn/constrained_dynamics.hpp"
#include "fracdyn/errors.hpp"
#include "fracdyn/scenario.hpp"
#include "fracdyn/verify.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kDivergence = 2, kAccuracy = 3, kVerify = 4 };

struct Common {
  std::string config;
  std::string scenario;
  std::string out;
  std::optional<double> h;
  std::optional<double> t_end;
  std::string scheme;
  bool quiet = false;
};

fracdyn::ScenarioConfig resolve(const Common& o) {
  using fracdyn::ConfigError;
  if (!o.config.empty() && !o.scenario.empty())
    throw ConfigError("--scenario", "give either --config or --scenario, not both");
  fracdyn::ScenarioConfig cfg = o.config.empty()
                                    ? fracdyn::default_config(o.scenario.empty() ? "oscillator-1d" : o.scenario)
                                    : fracdyn::load_config(o.config);
  if (o.h) cfg.h = *o.h;
  if (o.t_end) cfg.t_end = *o.t_end;
  if (!o.scheme.empty()) {
    try {
      cfg.scheme = fracdyn::scheme_from_string(o.scheme);
    } catch (const std::exception& e) {
      throw ConfigError("--scheme", e.what());
    }
  }
  if (!o.out.empty()) cfg.out_dir = o.out;
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* cmd, Common& o) {
  cmd->set_help_flag("--help", "print this help message and exit");
  cmd->add_option("--config", o.config, "scenario JSON file");
  cmd->add_option("--scenario", o.scenario, "built-in scenario id (default parameters)");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--h", o.h, "step size");
  cmd->add_option("--t-end", o.t_end, "final time");
  cmd->add_option("--scheme", o.scheme, "semi-implicit-euler | velocity-verlet | abm-fractional");
  cmd->add_flag("--quiet", o.quiet, "suppress progress output");
}

int cmd_run(const Common& o) {
  const auto cfg = resolve(o);
  const auto out = fracdyn::run_scenario(cfg);
  const auto files = fracdyn::write_artifacts(cfg, out, cfg.out_dir);
  if (!o.quiet) {
    std::cout << "scenario " << cfg.scenario << ": " << out.result.q.size() << " nodes, "
              << out.wall_seconds << " s\n";
    std::cout << "  " << files.trajectory.string() << "\n";
    if (files.comparison) std::cout << "  " << files.comparison->string() << "\n";
    std::cout << "  " << files.summary.string() << "\n";
    if (out.comparison) std::cout << "  max |error| vs reference: " << out.max_abs_error << "\n";
  }
  if (out.comparison && !(out.max_abs_error <= cfg.tolerance)) {
    std::cerr << "error: max |error| " << out.max_abs_error << " exceeds tolerance " << cfg.tolerance
              << "\n";
    return kAccuracy;
  }
  return kOk;
}

int cmd_verify(const std::string& suite, bool quiet) {
  const auto report = fracdyn::run_verify(suite);
  fracdyn::print_report(report, std::cout, quiet);
  return report.all_passed() ? kOk : kVerify;
}

int cmd_convergence(const Common& o, const std::string& problem, const std::string& ladder_spec) {
  const auto ladder = fracdyn::parse_ladder(ladder_spec);
  fracdyn::ConvergenceTable table;
  std::string stem;
  if (!problem.empty()) {
    if (!o.config.empty() || !o.scenario.empty())
      throw fracdyn::ConfigError("--problem", "give either --problem or a scenario, not both");
    try {
      table = fracdyn::convergence_study(problem, ladder);
    } catch (const fracdyn::DomainError& e) {
      throw fracdyn::ConfigError("--problem", e.what());
    }
    stem = problem;
  } else {
    const auto cfg = resolve(o);
    table = fracdyn::scenario_convergence(cfg, ladder);
    stem = cfg.file_stem();
  }
  const std::string dir = o.out.empty() ? "out" : o.out;
  std::filesystem::create_directories(dir);
  const auto file = std::filesystem::path(dir) / (stem + "_convergence.csv");
  fracdyn::write_convergence_csv(table, file);
  if (!o.quiet) {
    std::printf("%-14s %-14s %s\n", "h", "error", "order");
    for (const auto& r : table.rows) std::printf("%-14.6e %-14.6e %.3f\n", r.h, r.error, r.order);
    std::printf("fitted order %.3f%s\n", table.fitted_order(), table.monotone ? "" : " (non-monotone)");
    std::printf("%s\n", file.string().c_str());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fracdyn: fractional constrained dynamics"};
  app.require_subcommand(1);

  Common run_opts, conv_opts;
  auto* run = app.add_subcommand("run", "integrate a scenario and write CSV/JSON artifacts");
  add_common(run, run_opts);

  std::string suite = "all";
  bool verify_quiet = false;
  auto* verify = app.add_subcommand("verify", "run the built-in verification suites");
  verify->add_option("suite", suite, "operators | mittag-leffler | oscillator | constraints | all");
  verify->add_flag("--quiet", verify_quiet, "print failing checks only");

  std::string problem, ladder = "1/64,1/128,1/256,1/512";
  auto* conv = app.add_subcommand("convergence", "error table over a step ladder");
  add_common(conv, conv_opts);
  conv->add_option("--problem", problem,
                   "harmonic | quadrature | caputo-pt | caputo-l1 | oscillator-abm | oscillator-1d");
  conv->add_option("--ladder", ladder, "comma-separated steps, e.g. 1/64,1/128,1/256");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*verify) return cmd_verify(suite, verify_quiet);
    return cmd_convergence(conv_opts, problem, ladder);
  } catch (const fracdyn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const fracdyn::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kDivergence;
  } catch (const fracdyn::SingularConstraintError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kDivergence;
  } catch (const fracdyn::AccuracyLossError& e) {
    std::cerr << "accuracy loss: " << e.what() << "\n";
    return kAccuracy;
  } catch (const fracdyn::DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  }
}
