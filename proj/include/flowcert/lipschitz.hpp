#pragma once

#include <cstdint>

#include "flowcert/core.hpp"

namespace flowcert {

/// Sampled estimates of the Lipschitz constants of f (L) and grad f (M) on a
/// region. These are inflated sampled maxima: downstream step-size thresholds
/// shrink when L or M grow, so overestimates stay on the safe side, while the
/// certificates remain conditional on the region containing the trajectories
/// (checked post hoc by the callers).
struct LipschitzEstimate {
  double L = 0.0;
  double M = 0.0;
  Region region = Region::ball(Vector::Zero(1), 1.0);
  int n_samples = 0;
  double inflation = 1.2;
};

/// L = inflation * max ||grad f|| over samples; M = inflation * max of
/// gradient difference quotients over sample pairs (consecutive and local),
/// and of sampled Hessian spectral norms when an analytic Hessian exists.
/// M is floored at 1e-12 so affine objectives do not divide by zero.
/// Deterministic for a fixed seed, and nondecreasing in n_samples.
LipschitzEstimate estimate_constants(const ObjectiveProblem& problem,
                                     const Region& region, int n_samples,
                                     std::uint64_t seed,
                                     double inflation = 1.2);

}  // namespace flowcert
