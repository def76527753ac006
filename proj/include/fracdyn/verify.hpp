#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fracdyn {

struct CheckRow {
  std::string suite;
  std::string name;
  double measured;
  double tolerance;
  bool at_least;  // pass when measured >= tolerance (else measured <= tolerance)
  bool passed;
};

struct VerifyReport {
  std::vector<CheckRow> rows;
  double wall_seconds = 0.0;
  bool all_passed() const;
};

/// Suites: operators, mittag-leffler, oscillator, constraints, all.
VerifyReport run_verify(const std::string& suite);
const std::vector<std::string>& verify_suites();

/// Pass/fail table; failing rows are marked with '>>'. With quiet, only
/// failing rows and the final line are printed.
void print_report(const VerifyReport& report, std::ostream& os, bool quiet = false);

}  // namespace fracdyn
