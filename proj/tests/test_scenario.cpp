#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fracdyn/scenario.hpp"

using namespace fracdyn;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string key_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("fracdyn_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("every scenario default validates and round-trips") {
  for (const auto& id : scenario_ids()) {
    CAPTURE(id);
    auto c = default_config(id);
    CHECK_NOTHROW(c.validate());
    CHECK(parse_config(serialize_config(c)) == c);
    c.h = 1.0 / 3.0;
    c.tolerance = 0.1 + 0.2;
    c.higher = std::vector<double>(c.dim(), 1e-300);
    c.history_window = 64;
    c.stem = "x";
    c.c1 = 0.25;
    c.seed = 123456789012345ULL;
    CHECK(parse_config(serialize_config(c)) == c);
  }
  CHECK_THROWS_AS(default_config("nope"), ConfigError);
}

TEST_CASE("config errors name the offending key") {
  CHECK(key_of(R"({"scenario":"linear-nd","grid":{"h":-1}})") == "grid.h");
  CHECK(key_of(R"({"scenario":"linear-nd","grid":{"hh":1}})") == "grid.hh");
  CHECK(key_of(R"({"scenario":"linear-nd","parameters":{"alpha":"x"}})") == "parameters.alpha");
  CHECK(key_of(R"({"scenario":"warp"})") == "scenario");
  CHECK(key_of(R"({"scenario":"linear-nd","initial":{"q0":[1]}})") == "initial.qdot0");
  CHECK(key_of(R"({"scenario":"linear-nd","grid":{"scheme":"rk4"}})") == "grid.scheme");
  CHECK(key_of(R"({"scenario":"linear-nd","parameters":{"alpha":1.0}})") == "parameters.alpha");
  CHECK(key_of("{not json") != "");
}

TEST_CASE("numbers are written with 17 significant digits") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(1.0) == "1");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("ladder parsing") {
  const auto l = parse_ladder("1/256, 0.001,1/64");
  REQUIRE(l.size() == 3);
  CHECK(l[0] == 1.0 / 256);
  CHECK(l[1] == 0.001);
  CHECK_THROWS_AS(parse_ladder("1/64,1/128"), ConfigError);
  CHECK_THROWS_AS(parse_ladder("1/64,x,1/128"), ConfigError);
}

TEST_CASE("artifacts are byte-identical across runs and schema is stable") {
  auto c = default_config("linear-nd");
  c.t_end = 1.0;
  c.h = 1.0 / 128;
  const auto d1 = scratch("a"), d2 = scratch("b");
  const auto a = write_artifacts(c, run_scenario(c), d1);
  const auto b = write_artifacts(c, run_scenario(c), d2);
  const std::string ta = slurp(a.trajectory);
  CHECK(ta == slurp(b.trajectory));
  CHECK(ta.rfind("t,q_1,q_2,qdot_1,qdot_2,lambda,constraint_residual\n", 0) == 0);
  CHECK(ta.find('\r') == std::string::npos);
  CHECK(std::count(ta.begin(), ta.end(), '\n') == 129 + 1);
  CHECK(slurp(a.summary).find("wall_time_seconds") != std::string::npos);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("oscillator scenario writes a passing comparison") {
  auto c = default_config("oscillator-1d");
  c.t_end = 2.0;
  c.h = 1.0 / 256;
  const auto out = run_scenario(c);
  REQUIRE(out.comparison);
  CHECK(out.max_abs_error < c.tolerance);
  const auto d = scratch("c");
  const auto files = write_artifacts(c, out, d);
  REQUIRE(files.comparison);
  CHECK(slurp(*files.comparison).rfind("t,", 0) == 0);
  fs::remove_all(d);
}

TEST_CASE("b2 = 0 scenario follows the classical q_1") {
  auto c = default_config("case1-2d-b2zero");
  c.h = 1e-3;
  const auto out = run_scenario(c);
  REQUIRE(out.comparison);
  CHECK(out.max_abs_error < 1e-4);
}

TEST_CASE("every scenario runs on a short horizon") {
  for (const auto& id : scenario_ids()) {
    CAPTURE(id);
    auto c = default_config(id);
    c.t_end = 0.5;
    c.h = 1.0 / 256;
    const auto out = run_scenario(c);
    CHECK(out.result.q.size() == 129);
  }
}

TEST_CASE("scenario convergence uses a reference run when no oracle exists") {
  auto c = default_config("linear-nd");
  c.t_end = 2.0;
  const std::vector<double> ladder = {1.0 / 32, 1.0 / 64, 1.0 / 128};
  const auto t = scenario_convergence(c, ladder);
  CHECK(t.rows.size() == 3);
  CHECK(t.fitted_order() > 0.75);
}
