#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flowcert/problems.hpp"

namespace flowcert {

enum class ExperimentKind {
  gd,
  flow,
  tracking,
  kl_check,
  length_cert,
  decrease,
  saddle_mc,
  sigma,
};

const char* to_string(ExperimentKind k);

/// One experiment, parsed from a key-value config document. Fields are only
/// meaningful for the kinds that accept the corresponding keys; parse_config
/// rejects keys that a kind does not use.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::gd;
  std::string problem_id;
  ProblemParams params;

  std::optional<Vector> x0;
  std::optional<Region> region;

  double alpha = 0.0;
  std::vector<double> alphas;  // gd: explicit step sequence
  bool auto_alpha = false;     // tracking: use the alpha_bar threshold

  long long max_iter = 1'000'000;
  double grad_tol = 1e-10;
  double escape_radius = 1e6;

  double horizon = 10.0;
  double rel_tol = 1e-8;

  double epsilon = 0.1;  // tracking target

  double psi_c = 1.0;
  double psi_theta = 0.5;
  double psi_t_break = std::numeric_limits<double>::infinity();
  std::optional<std::vector<double>> critical_values;  // V override
  int m = 1;
  double eps_slack = 1.0;

  std::optional<double> lipschitz_L;
  std::optional<double> lipschitz_M;
  int lipschitz_samples = 4000;

  // length-cert: sample initial points from the concentric ball of this
  // radius instead of the whole region (0 = whole region).
  double start_radius = 0.0;

  int samples = 1000;  // kl-check / sigma
  int grid = 0;        // kl-check: per-axis grid resolution (2-d problems)
  int trials = 1000;   // saddle-mc
  int inits = 500;     // decrease
  int seeds = 50;      // length-cert trajectories

  double threshold = 0.01;  // saddle-mc saddle-fraction bound

  std::string sigma_mode = "continuous";
  double sigma_alpha_bar = 0.0;
  std::optional<double> sup_f;

  double init_radius = 0.3;
  double exit_radius = 0.8;

  std::uint64_t seed = 1;
  std::string out_prefix = "experiment";
};

struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;  // all validation errors, not just the first

  bool ok() const { return errors.empty() && config.has_value(); }
};

/// Parses one experiment document of `key = value` lines ('#' starts a
/// comment). Unknown keys, keys that the experiment kind does not accept,
/// duplicate keys, and out-of-range values are all collected as errors.
ParseResult parse_config(const std::string& text);

ParseResult parse_config_file(const std::string& path);

/// Builds the problem an experiment refers to.
ObjectiveProblem problem_from_config(const ExperimentConfig& config);

}  // namespace flowcert
