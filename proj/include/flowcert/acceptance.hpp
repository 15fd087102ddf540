#pragma once

#include <string>
#include <vector>

namespace flowcert {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs the built-in verification battery (the `verify` subcommand and the
/// acceptance test binary share it). Each criterion is self-contained and
/// pins its own tolerances.
std::vector<CriterionResult> run_acceptance_suite(int threads = 1);

/// Prints one pass/fail line per criterion to stdout; returns the number of
/// failed criteria.
int report_acceptance(const std::vector<CriterionResult>& results);

}  // namespace flowcert
