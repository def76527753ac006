#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracdyn/fode_solver.hpp"

namespace fracdyn {

/// Invalid scenario configuration; key() names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

struct PotentialConfig {
  std::string kind = "quadratic";  // zero | quadratic | quartic
  std::vector<double> k;           // per-component stiffness (quadratic, quartic)
  std::vector<double> c;           // quartic coefficients: u += c_i q_i^4 / 4
  bool operator==(const PotentialConfig&) const = default;
};

struct KConfig {
  std::string kind = "linear";  // linear | cubic | sine
  double c = 0.0;               // cubic: K = x + c x^3
  bool operator==(const KConfig&) const = default;
};

struct ScenarioConfig {
  std::string scenario = "oscillator-1d";
  /// Constraint order, or the oscillator order for oscillator-1d.
  double alpha = 2.5;
  std::vector<double> a;
  std::vector<double> b;
  double omega2 = 1.0;
  /// oscillator-1d integration constants; empty: derived from the initial data.
  std::optional<double> c1;
  std::optional<double> c2;
  double g = 1.0;
  PotentialConfig potential;
  KConfig K;
  std::string path = "oscillator";  // oscillator-1d: oscillator | constraint
  std::string form = "reduced";     // nonlinear-fracosc: reduced | pre-reduction
  std::string d1dalpha = "auto";    // auto | direct | shifted
  bool project_initial = false;

  double h = 1.0 / 1024;
  double t_end = 10.0;
  Scheme scheme = Scheme::kVelocityVerlet;
  std::optional<std::size_t> history_window;

  std::vector<double> q0;
  std::vector<double> qdot0;
  std::vector<double> p0;  // hamilton-linear; defaults to qdot0
  std::optional<std::vector<double>> higher;

  double tolerance = 1e-3;  // comparison acceptance
  std::string out_dir = "out";
  std::string stem;  // file prefix; defaults to the scenario id
  std::uint64_t seed = 0;

  bool operator==(const ScenarioConfig&) const = default;

  /// Throws ConfigError naming the first offending key.
  void validate() const;
  std::size_t dim() const;
  std::string file_stem() const { return stem.empty() ? scenario : stem; }
};

const std::vector<std::string>& scenario_ids();

/// Default parameters of each named scenario.
ScenarioConfig default_config(const std::string& scenario);

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ScenarioConfig& cfg);

struct ScenarioOutcome {
  SimulationResult result;
  /// t, numerical, exact, abs_error rows when an oracle exists.
  std::optional<std::vector<std::vector<double>>> comparison;
  std::vector<std::string> comparison_header;
  double max_abs_error = 0.0;
  double wall_seconds = 0.0;
};

/// Runs the scenario in memory (no files).
ScenarioOutcome run_scenario(const ScenarioConfig& cfg);

struct RunArtifacts {
  std::filesystem::path trajectory;
  std::filesystem::path summary;
  std::optional<std::filesystem::path> comparison;
};

/// Writes trajectory CSV, summary JSON and, when available, comparison CSV.
RunArtifacts write_artifacts(const ScenarioConfig& cfg, const ScenarioOutcome& out,
                             const std::filesystem::path& dir);

/// Convergence table for a scenario: exact oracle when one exists, else a
/// reference run at a quarter of the finest step.
ConvergenceTable scenario_convergence(const ScenarioConfig& cfg, std::span<const double> ladder);

/// "1/256,1/512,0.001" -> steps.
std::vector<double> parse_ladder(const std::string& spec);

void write_convergence_csv(const ConvergenceTable& table, const std::filesystem::path& file);

/// 17 significant digits, '.' decimal point.
std::string format_number(double x);

}  // namespace fracdyn
