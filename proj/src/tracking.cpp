#include "flowcert/tracking.hpp"

#include <cmath>

#include "flowcert/rng.hpp"

namespace flowcert {

double alpha_bar(double epsilon, double T, double L, double M) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw std::invalid_argument("alpha_bar: epsilon must lie in (0, 1)");
  }
  if (!(T > 0.0) || !(L > 0.0) || !(M > 0.0)) {
    throw std::invalid_argument("alpha_bar: T, L, M must be positive");
  }
  return 2.0 * epsilon * std::exp(-M * T) / (L * M * T);
}

TrackingReport tracking_deviation(const ObjectiveProblem& problem,
                                  const Vector& x0,
                                  const StepSchedule& schedule,
                                  const TrackingSetup& setup,
                                  double flow_rel_tol) {
  TrackingReport report;
  report.epsilon = setup.epsilon;
  report.horizon = setup.horizon;
  report.variant =
      problem.lower_bounded ? "lower_bounded" : "single_point_remark";

  const double threshold = alpha_bar(setup.epsilon, setup.horizon,
                                     setup.lipschitz.L, setup.lipschitz.M);
  report.alpha_bar_value = threshold;
  if (schedule.alpha_upper() > threshold * (1.0 + 1e-12)) {
    report.invalidated = true;
    report.note = "schedule alpha_upper " +
                  std::to_string(schedule.alpha_upper()) +
                  " exceeds alpha_bar " + std::to_string(threshold);
    return report;
  }

  FlowTrajectory flow;
  try {
    flow = integrate_flow(problem, x0, setup.horizon, flow_rel_tol,
                          4.0 * setup.lipschitz.region.circumradius() +
                              setup.lipschitz.region.center().norm() + 1.0);
  } catch (const NonFiniteError&) {
    report.invalidated = true;
    report.note = "flow evaluation failed from x0";
    return report;
  }
  if (flow.termination == FlowTrajectory::Termination::blowup ||
      flow.termination == FlowTrajectory::Termination::nonfinite) {
    // For the not-lower-bounded variant this means T is past blow-up; in
    // either case the proposition's hypotheses fail.
    report.invalidated = true;
    report.note = std::string("flow terminated by ") +
                  to_string(flow.termination) + " before the horizon";
    return report;
  }

  bool inside = true;
  for (const Vector& x : flow.states) {
    inside = inside && setup.lipschitz.region.contains(x, 1e-9);
  }

  // Discrete iterates until the cumulative time passes the horizon.
  Vector x = x0;
  double t = 0.0;
  report.times.push_back(0.0);
  report.deviations.push_back(0.0);
  for (int k = 0;; ++k) {
    const double alpha = schedule.alpha(k);
    Vector g;
    try {
      g = eval_gradient(problem, x);
    } catch (const NonFiniteError&) {
      report.invalidated = true;
      report.note = "gradient method hit a non-finite evaluation";
      return report;
    }
    if (t + alpha > setup.horizon * (1.0 + 1e-15)) break;
    x = x - alpha * g;
    t += alpha;
    inside = inside && setup.lipschitz.region.contains(x, 1e-9);
    report.times.push_back(t);
    report.deviations.push_back((x - flow.state_at(t)).norm());
    if (static_cast<std::size_t>(k) > 200'000'000u) break;
  }

  if (!inside) {
    report.invalidated = true;
    report.note = "a trajectory left the Lipschitz-certified region " +
                  setup.lipschitz.region.describe();
    return report;
  }

  report.max_deviation = 0.0;
  for (double d : report.deviations) {
    report.max_deviation = std::max(report.max_deviation, d);
  }
  report.pass = report.max_deviation <= setup.epsilon + 10.0 * flow_rel_tol;
  return report;
}

CertificateReport taylor_residual_check(const FlowTrajectory& flow, double L,
                                        double M, int n_pairs,
                                        std::uint64_t seed,
                                        const Region& region) {
  if (flow.states.empty()) {
    return invalidated_certificate("taylor_residual", "empty flow");
  }
  if (flow.states.size() == 1) {
    return make_certificate("taylor_residual", 0.0, 0.0, "constant flow");
  }
  Rng rng = Rng::child(seed, 0x7A71);
  const double t_end = flow.t_end();
  const double slack = 10.0 * flow.rel_tol;

  double margin = std::numeric_limits<double>::infinity();
  std::string worst;
  int used = 0;
  for (int i = 0; i < n_pairs; ++i) {
    const double s = rng.uniform(0.0, t_end);
    const double dt = rng.uniform(0.0, std::min(0.1, t_end - s));
    const double t = s + dt;
    const Vector xs = flow.state_at(s);
    const Vector xt = flow.state_at(t);
    if (!region.contains(xs, 1e-9) || !region.contains(xt, 1e-9)) continue;
    const double residual = (xt - xs - dt * flow.deriv_at(s)).norm();
    const double bound = 0.5 * M * L * dt * dt;
    ++used;
    const double m = bound - residual;
    if (m < margin) {
      margin = m;
      worst = "s = " + std::to_string(s) + ", t = " + std::to_string(t);
    }
  }
  if (used == 0) {
    return invalidated_certificate("taylor_residual",
                                   "no sampled pair stayed in the region");
  }
  return make_certificate("taylor_residual", margin, slack, worst,
                          std::to_string(used) + " pairs checked");
}

}  // namespace flowcert
