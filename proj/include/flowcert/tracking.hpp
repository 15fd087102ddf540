#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flowcert/descent.hpp"
#include "flowcert/flow.hpp"
#include "flowcert/lipschitz.hpp"

namespace flowcert {

/// Step-size threshold under which the gradient method tracks the gradient
/// flow within epsilon up to time T: 2 epsilon e^{-MT} / (L M T).
/// Requires epsilon in (0, 1); L and M are Lipschitz constants of f and
/// grad f on a region containing both trajectories.
double alpha_bar(double epsilon, double T, double L, double M);

struct TrackingSetup {
  double epsilon = 0.0;
  double horizon = 0.0;
  LipschitzEstimate lipschitz;
};

struct TrackingReport {
  double epsilon = 0.0;
  double horizon = 0.0;
  double alpha_bar_value = 0.0;   // threshold computed from the setup
  std::vector<double> times;      // t_k = alpha_0 + ... + alpha_{k-1} <= T
  std::vector<double> deviations; // ||x_k - x(t_k)||
  double max_deviation = 0.0;
  bool pass = false;
  bool invalidated = false;
  std::string note;
  std::string variant;  // "lower_bounded" or "single_point_remark"
};

/// Runs the gradient method and the gradient flow from the same x0 and
/// records ||x_k - x(t_k)|| at every discrete time t_k <= T. Passes when the
/// maximum deviation is at most epsilon + 10 * flow_rel_tol. The report is
/// invalidated (not failed) when the schedule exceeds the alpha_bar
/// threshold or either trajectory leaves the Lipschitz-certified region.
/// Problems not bounded below use the single-initial-point variant, which
/// additionally requires the flow to reach T without blow-up.
TrackingReport tracking_deviation(const ObjectiveProblem& problem,
                                  const Vector& x0,
                                  const StepSchedule& schedule,
                                  const TrackingSetup& setup,
                                  double flow_rel_tol = 1e-8);

/// Samples pairs s < t with t - s <= 0.1 along the flow and checks the local
/// Taylor bound ||x(t) - x(s) - x'(s)(t - s)|| <= (M L / 2)(t - s)^2,
/// allowing a 10 * flow tolerance slack. Pairs leaving the region are
/// skipped.
CertificateReport taylor_residual_check(const FlowTrajectory& flow, double L,
                                        double M, int n_pairs,
                                        std::uint64_t seed,
                                        const Region& region);

}  // namespace flowcert
