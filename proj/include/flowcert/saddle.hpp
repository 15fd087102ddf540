#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flowcert/descent.hpp"
#include "flowcert/flow.hpp"

namespace flowcert {

/// Critical-point classification by the Hessian eigenvalue sign pattern,
/// tested against a scale-free threshold tol_eig * (1 + max |eigenvalue|).
/// A strict saddle has a negative eigenvalue without being eligible as a
/// maximum; points whose gradient norm exceeds tol_grad are reported as
/// not_critical rather than classified.
struct SaddleReport {
  enum class Kind {
    not_critical,
    local_min_candidate,
    strict_saddle,
    strict_max_candidate,
    degenerate,
  };

  Vector point;
  double grad_norm = 0.0;
  Vector eigenvalues;  // ascending
  Kind classification = Kind::not_critical;
  double tol_grad = 0.0;
  double tol_eig = 0.0;  // effective (scaled) threshold
};

const char* to_string(SaddleReport::Kind k);

/// Uses the analytic Hessian when present, otherwise symmetrized finite
/// differences.
SaddleReport classify_critical_point(const ObjectiveProblem& problem,
                                     const Vector& x, double tol_grad = 1e-6,
                                     double tol_eig = 1e-6);

struct EscapeOptions {
  double grad_tol = 1e-8;
  long long max_iter = 100'000;
  double escape_radius = 1e6;
  int threads = 1;
};

struct EscapeResult {
  double saddle_fraction = 0.0;  // strict-saddle limits / n_trials
  int n_trials = 0;
  int n_converged = 0;
  int n_saddle_limits = 0;
  int n_nonconverged = 0;  // hit max_iter; reported, never dropped
  int n_unbounded = 0;     // escaped or non-finite; step size too large
  std::vector<SaddleReport> reports;  // one per trial (classified at the last iterate)
  std::vector<Vector> initial_points;
};

/// Monte Carlo over initial points in the region: constant-step gradient
/// descent to grad_tol, then classification of each limit. The fraction of
/// trials whose limit is a strict saddle estimates the measure of the
/// saddle-attracted set, which is zero under the strict-saddle property.
EscapeResult escape_monte_carlo(const ObjectiveProblem& problem,
                                const Region& region, double alpha,
                                int n_trials, std::uint64_t seed,
                                const EscapeOptions& options = {});

enum class SigmaMode { continuous, continuous_T, discrete };

const char* to_string(SigmaMode m);

struct SigmaOptions {
  double flow_rel_tol = 1e-8;
  double grad_tol = 1e-9;
  long long max_iter = 300'000;
  double escape_radius = 1e6;
  std::optional<double> sup_f;  // known sup of f over the region, if any
  int threads = 1;
};

/// Monte-Carlo lower bound of the trajectory-length suprema: sigma(X0) for
/// gradient flows run to convergence, sigma_T(X0) for flows stopped at a
/// horizon, and sigma(X0, alpha_bar) for gradient-method runs with step
/// sizes drawn from (0, alpha_bar]. Observed maxima only ever bound the
/// supremum from below.
struct SigmaEstimate {
  SigmaMode mode = SigmaMode::continuous;
  Region region = Region::ball(Vector::Zero(1), 1.0);
  double alpha_bar = 0.0;  // discrete mode
  double horizon = 0.0;
  int n_samples = 0;
  double max_length = 0.0;
  int argmax = -1;
  std::vector<double> lengths;
  /// continuous_T only: sqrt(T (sup_X0 f - m(f))) when the smallest critical
  /// value m(f) is known; sup_X0 f from options.sup_f or the sampled maximum.
  std::optional<double> analytic_bound;
  bool bound_holds = true;
  bool blowup = false;  // an unbounded trajectory was met: evidence sigma = inf
  std::string note;
};

SigmaEstimate estimate_sigma(const ObjectiveProblem& problem,
                             const Region& region, SigmaMode mode,
                             double alpha_bar, double horizon, int n_samples,
                             std::uint64_t seed,
                             const SigmaOptions& options = {});

}  // namespace flowcert
