#include "flowcert/flow.hpp"

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace flowcert {

namespace {

constexpr double kFlowGradTol = 1e-12;
constexpr std::size_t kMaxAcceptedSteps = 4'000'000;

// 5-point Gauss-Legendre nodes/weights on [0, 1].
constexpr double kGlNode[5] = {
    0.5 - 0.45305681557787663, 0.5 - 0.26923465505284155, 0.5,
    0.5 + 0.26923465505284155, 0.5 + 0.45305681557787663};
constexpr double kGlWeight[5] = {
    0.5 * 0.23692688505618909, 0.5 * 0.47862867049936647, 0.5 * 0.56888888888888889,
    0.5 * 0.47862867049936647, 0.5 * 0.23692688505618909};

struct HermiteSegment {
  double t0, t1;
  const Vector *x0, *x1, *d0, *d1;

  Vector state(double t) const {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * (*x0) + (s3 - 2 * s2 + s) * h * (*d0) +
           (-2 * s3 + 3 * s2) * (*x1) + (s3 - s2) * h * (*d1);
  }

  Vector deriv(double t) const {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s;
    return ((6 * s2 - 6 * s) / h) * (*x0) + (3 * s2 - 4 * s + 1) * (*d0) +
           ((-6 * s2 + 6 * s) / h) * (*x1) + (3 * s2 - 2 * s) * (*d1);
  }
};

int segment_index(const std::vector<double>& times, double t) {
  // Largest i with times[i] <= t, clamped to a valid segment start.
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  int i = static_cast<int>(it - times.begin()) - 1;
  return std::clamp(i, 0, static_cast<int>(times.size()) - 2);
}

}  // namespace

const char* to_string(FlowTrajectory::Termination t) {
  switch (t) {
    case FlowTrajectory::Termination::horizon: return "horizon";
    case FlowTrajectory::Termination::converged: return "converged";
    case FlowTrajectory::Termination::blowup: return "blowup";
    case FlowTrajectory::Termination::nonfinite: return "nonfinite";
  }
  return "?";
}

Vector FlowTrajectory::state_at(double t) const {
  if (states.empty()) throw std::logic_error("empty flow trajectory");
  if (states.size() == 1 || t <= times.front()) return states.front();
  if (t >= times.back()) return states.back();
  const int i = segment_index(times, t);
  return HermiteSegment{times[i], times[i + 1], &states[i], &states[i + 1],
                        &derivs[i], &derivs[i + 1]}
      .state(t);
}

Vector FlowTrajectory::deriv_at(double t) const {
  if (states.empty()) throw std::logic_error("empty flow trajectory");
  if (states.size() == 1) return Vector::Zero(states.front().size());
  const double tc = std::clamp(t, times.front(), times.back());
  const int i = segment_index(times, tc);
  return HermiteSegment{times[i], times[i + 1], &states[i], &states[i + 1],
                        &derivs[i], &derivs[i + 1]}
      .deriv(tc);
}

FlowTrajectory integrate_flow(const ObjectiveProblem& problem,
                              const Vector& x0, double horizon,
                              double rel_tol, double escape_radius) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("integrate_flow: horizon must be positive");
  }
  if (!(rel_tol > 1e-13) || !(rel_tol < 1e-2)) {
    throw std::invalid_argument("integrate_flow: rel_tol outside (1e-13, 1e-2)");
  }
  if (!(escape_radius > x0.norm())) {
    throw std::invalid_argument("integrate_flow: escape_radius must exceed ||x0||");
  }

  FlowTrajectory flow;
  flow.horizon = horizon;
  flow.rel_tol = rel_tol;
  flow.escape_radius = escape_radius;

  const auto system = [&problem](const Vector& x, Vector& dxdt, double) {
    if (!all_finite(x)) {
      throw NonFiniteError("flow: state left the finite domain");
    }
    dxdt = -eval_gradient(problem, x);
  };

  // Appends an accepted node; returns false when integration must stop there.
  const auto accept = [&](double t, const Vector& x) -> bool {
    Evaluation ev;
    try {
      ev = eval_objective(problem, x);
    } catch (const NonFiniteError&) {
      flow.termination = FlowTrajectory::Termination::nonfinite;
      return false;
    }
    if (!flow.times.empty()) {
      // Quadrature of ||grad f|| and ||grad f||^2 over the new segment.
      const Vector deriv_new = -ev.gradient;
      HermiteSegment seg{flow.times.back(), t,          &flow.states.back(),
                         &x,                &flow.derivs.back(), &deriv_new};
      const double h = t - flow.times.back();
      double len = 0.0, energy = 0.0;
      try {
        for (int q = 0; q < 5; ++q) {
          const double tq = seg.t0 + kGlNode[q] * h;
          const double gn = eval_gradient(problem, seg.state(tq)).norm();
          len += kGlWeight[q] * h * gn;
          energy += kGlWeight[q] * h * gn * gn;
        }
      } catch (const NonFiniteError&) {
        // Interpolated state overflowed; fall back to the chord.
        len = (x - flow.states.back()).norm();
        const double g0 = flow.derivs.back().norm();
        const double g1 = ev.gradient.norm();
        energy = 0.5 * h * (g0 * g0 + g1 * g1);
      }
      flow.arc_length += len;
      flow.energy_integral += energy;
    }
    flow.times.push_back(t);
    flow.states.push_back(x);
    flow.derivs.push_back(-ev.gradient);
    flow.f_values.push_back(ev.value);
    flow.cum_arc_length.push_back(flow.arc_length);

    if (ev.gradient.norm() <= kFlowGradTol) {
      flow.termination = FlowTrajectory::Termination::converged;
      return false;
    }
    if (x.norm() > escape_radius) {
      flow.termination = FlowTrajectory::Termination::blowup;
      return false;
    }
    return true;
  };

  if (!accept(0.0, x0)) return flow;

  namespace ode = boost::numeric::odeint;
  using Stepper =
      ode::runge_kutta_dopri5<Vector, double, Vector, double,
                              ode::vector_space_algebra>;
  // Per-step error at most kAbsFloor + rel_tol * (|x| + |dt x'|), tighter
  // than the rel_tol * (1 + |x|) contract. The tiny absolute floor keeps the
  // decay toward critical points resolved down to the 1e-12 convergence
  // threshold; with a floor at rel_tol the tail would stall in step-size
  // stability noise and convergence would never fire.
  constexpr double kAbsFloor = 1e-14;
  auto controlled = ode::make_controlled<Stepper>(kAbsFloor, rel_tol);

  const double dt_min = 1e-14 * horizon;
  const double dt_max = horizon / 16.0;
  const double g0 = flow.derivs.front().norm();
  double dt = std::min(dt_max, 1e-2 * (1.0 + x0.norm()) / (1.0 + g0));

  Vector x = x0;
  double t = 0.0;
  flow.termination = FlowTrajectory::Termination::horizon;
  while (t < horizon * (1.0 - 1e-15)) {
    if (flow.states.size() >= kMaxAcceptedSteps) {
      throw std::runtime_error("integrate_flow: accepted-step budget exceeded");
    }
    const double dt_try = std::min({dt, dt_max, horizon - t});
    const Vector x_prev = x;
    const double t_prev = t;
    double dt_io = dt_try;
    bool ok = false;
    try {
      ok = controlled.try_step(system, x, t, dt_io) ==
           ode::controlled_step_result::success;
      dt = dt_io;
    } catch (const NonFiniteError&) {
      // A trial stage overflowed. Restore, shrink, retry; persistent
      // shrinkage past dt_min is finite-time escape.
      x = x_prev;
      t = t_prev;
      dt = 0.5 * dt_try;
      controlled = ode::make_controlled<Stepper>(kAbsFloor, rel_tol);
    }
    if (!ok) {
      if (dt < dt_min) {
        flow.termination = FlowTrajectory::Termination::blowup;
        break;
      }
      continue;
    }
    if (!accept(t, x)) break;
  }
  return flow;
}

double arc_length(const FlowTrajectory& flow) {
  if (flow.states.empty()) throw std::invalid_argument("arc_length: empty flow");
  return flow.arc_length;
}

double energy_identity_residual(const FlowTrajectory& flow,
                                const ObjectiveProblem& problem) {
  if (flow.states.empty()) {
    throw std::invalid_argument("energy_identity_residual: empty flow");
  }
  const double f0 = eval_value(problem, flow.states.front());
  const double f1 = eval_value(problem, flow.states.back());
  const double drop = f0 - f1;
  return std::abs(drop - flow.energy_integral) / (1.0 + std::abs(drop));
}

}  // namespace flowcert
