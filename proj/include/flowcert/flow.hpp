#pragma once

#include <vector>

#include "flowcert/core.hpp"

namespace flowcert {

/// Numerical solution of the gradient flow x'(t) = -grad f(x(t)) on a
/// nonuniform time grid of accepted integrator steps. Arc length and the
/// energy integral are accumulated by Gauss-Legendre quadrature of
/// ||grad f(x(t))|| (and its square) over each accepted step, with x(t)
/// interpolated by the same cubic Hermite polynomial that provides dense
/// output.
struct FlowTrajectory {
  enum class Termination { horizon, converged, blowup, nonfinite };

  std::vector<double> times;     // strictly increasing, times[0] == 0
  std::vector<Vector> states;
  std::vector<Vector> derivs;    // x'(t_i) = -grad f(x(t_i))
  std::vector<double> f_values;
  std::vector<double> cum_arc_length;
  double arc_length = 0.0;
  double energy_integral = 0.0;  // integral of ||x'||^2
  Termination termination = Termination::horizon;
  double horizon = 0.0;
  double rel_tol = 0.0;
  double escape_radius = 0.0;

  double t_end() const { return times.back(); }
  const Vector& last() const { return states.back(); }
  int n_nodes() const { return static_cast<int>(times.size()); }

  /// Cubic Hermite dense output. Queries outside [0, t_end] clamp to the
  /// nearest endpoint state (past convergence the trajectory is stationary
  /// to integrator accuracy).
  Vector state_at(double t) const;

  /// Derivative of the Hermite interpolant (equals -grad f at the nodes).
  Vector deriv_at(double t) const;
};

const char* to_string(FlowTrajectory::Termination t);

/// Integrates the gradient flow with an embedded Dormand-Prince 5(4) pair and
/// per-step error control at rel_tol * (1 + |x|). Stops at the horizon, at
/// ||grad f|| <= 1e-12 (converged), at ||x|| > escape_radius (blowup), on a
/// non-finite evaluation at an accepted state (nonfinite), or when the step
/// size collapses below 1e-14 * horizon (blowup: finite-time escape).
FlowTrajectory integrate_flow(const ObjectiveProblem& problem,
                              const Vector& x0, double horizon,
                              double rel_tol = 1e-8,
                              double escape_radius = 1e6);

/// The stored quadrature value of integral ||x'(t)|| dt.
double arc_length(const FlowTrajectory& flow);

/// |f(x(0)) - f(x(end)) - integral ||x'||^2| / (1 + |f(x(0)) - f(x(end))|);
/// zero for exact trajectories by the chain rule (f o x)' = -||x'||^2.
double energy_identity_residual(const FlowTrajectory& flow,
                                const ObjectiveProblem& problem);

}  // namespace flowcert
