#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flowcert/config.hpp"

namespace flowcert {

struct RunOptions {
  std::string out_dir = ".";
  int threads = 1;
  double tolerance_scale = 1.0;  // multiplies certificate tolerance budgets
  std::optional<std::uint64_t> seed_override;
};

struct RunOutcome {
  std::vector<CertificateReport> certificates;
  std::vector<std::string> files_written;

  /// True when every certificate passed and none was invalidated; drives the
  /// process exit status.
  bool all_pass() const {
    for (const auto& c : certificates) {
      if (c.invalidated || !c.pass) return false;
    }
    return true;
  }
};

/// Runs one experiment and writes, under out_dir with the config's out
/// prefix: a JSON report of every certificate (with tolerances, seed, and
/// the build's git describe), and fixed-header CSV trajectory/plot data.
/// Outputs are byte-identical for identical config, seed, and
/// tolerance_scale, regardless of thread count.
RunOutcome run_experiment(const ExperimentConfig& config,
                          const RunOptions& options = {});

/// git describe of the source tree this binary was built from.
std::string build_git_describe();

}  // namespace flowcert
