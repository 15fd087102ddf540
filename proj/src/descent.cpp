#include "flowcert/descent.hpp"

#include <cmath>
#include <limits>

namespace flowcert {

StepSchedule StepSchedule::constant(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("StepSchedule: alpha must be positive");
  }
  StepSchedule s;
  s.fn_ = [alpha](int) { return alpha; };
  s.alpha_upper_ = alpha;
  s.alpha_lower_ = alpha;
  return s;
}

StepSchedule StepSchedule::sequence(std::vector<double> alphas) {
  if (alphas.empty()) {
    throw std::invalid_argument("StepSchedule: empty sequence");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("StepSchedule: steps must be positive");
    }
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  StepSchedule s;
  s.fn_ = [v = std::move(alphas)](int k) {
    return v[std::min<std::size_t>(k, v.size() - 1)];
  };
  s.alpha_upper_ = hi;
  s.alpha_lower_ = lo;
  return s;
}

StepSchedule StepSchedule::generator(std::function<double(int)> fn,
                                     double alpha_upper, double alpha_lower) {
  if (!fn) throw std::invalid_argument("StepSchedule: null generator");
  if (!(alpha_upper > 0.0)) {
    throw std::invalid_argument("StepSchedule: alpha_upper must be positive");
  }
  if (alpha_lower < 0.0 || alpha_lower > alpha_upper) {
    throw std::invalid_argument("StepSchedule: invalid alpha_lower");
  }
  StepSchedule s;
  s.fn_ = std::move(fn);
  s.alpha_upper_ = alpha_upper;
  s.alpha_lower_ = alpha_lower;
  return s;
}

double StepSchedule::alpha(int k) const {
  const double a = fn_(k);
  if (!(a > 0.0) || a > alpha_upper_ ||
      (alpha_lower_ > 0.0 && a < alpha_lower_)) {
    throw std::invalid_argument("StepSchedule: emitted alpha_" +
                                std::to_string(k) + " = " + std::to_string(a) +
                                " violates declared bounds");
  }
  return a;
}

const char* to_string(DiscreteTrajectory::Termination t) {
  switch (t) {
    case DiscreteTrajectory::Termination::grad_tol: return "grad_tol";
    case DiscreteTrajectory::Termination::max_iter: return "max_iter";
    case DiscreteTrajectory::Termination::escaped: return "escaped";
    case DiscreteTrajectory::Termination::nonfinite: return "nonfinite";
  }
  return "?";
}

DiscreteTrajectory run_gd(const ObjectiveProblem& problem, const Vector& x0,
                          const StepSchedule& schedule, long long max_iter,
                          double grad_tol, double escape_radius) {
  if (max_iter < 1) throw std::invalid_argument("run_gd: max_iter must be >= 1");
  if (grad_tol < 0.0) throw std::invalid_argument("run_gd: grad_tol must be >= 0");
  if (!(escape_radius > x0.norm())) {
    throw std::invalid_argument("run_gd: escape_radius must exceed ||x0||");
  }

  DiscreteTrajectory traj;
  traj.grad_tol = grad_tol;
  traj.escape_radius = escape_radius;

  Vector x = x0;
  for (long long k = 0;; ++k) {
    Evaluation ev;
    try {
      ev = eval_objective(problem, x);
    } catch (const NonFiniteError&) {
      traj.termination = DiscreteTrajectory::Termination::nonfinite;
      break;
    }
    traj.iterates.push_back(x);
    traj.f_values.push_back(ev.value);
    const double gnorm = ev.gradient.norm();
    traj.grad_norms.push_back(gnorm);
    traj.cum_length.push_back(
        traj.cum_length.empty()
            ? 0.0
            : traj.cum_length.back() +
                  (x - traj.iterates[traj.iterates.size() - 2]).norm());

    if (gnorm <= grad_tol) {
      traj.termination = DiscreteTrajectory::Termination::grad_tol;
      break;
    }
    if (x.norm() > escape_radius) {
      traj.termination = DiscreteTrajectory::Termination::escaped;
      break;
    }
    if (k == max_iter) {
      traj.termination = DiscreteTrajectory::Termination::max_iter;
      break;
    }

    const double alpha = schedule.alpha(static_cast<int>(k));
    x = x - alpha * ev.gradient;
    if (!all_finite(x)) {
      traj.termination = DiscreteTrajectory::Termination::nonfinite;
      break;
    }
    traj.steps.push_back(alpha);
  }
  // Drop a trailing step that produced no iterate (nonfinite successor).
  if (traj.steps.size() >= traj.iterates.size() && !traj.steps.empty()) {
    traj.steps.resize(traj.iterates.empty() ? 0 : traj.iterates.size() - 1);
  }
  if (traj.iterates.empty()) {
    throw NonFiniteError("run_gd: initial point evaluates non-finite");
  }
  return traj;
}

CertificateReport rate_certificate(const DiscreteTrajectory& traj,
                                   double alpha_lower) {
  if (!(alpha_lower > 0.0)) {
    throw std::invalid_argument("rate_certificate: alpha_lower must be > 0");
  }
  if (traj.termination != DiscreteTrajectory::Termination::grad_tol) {
    return invalidated_certificate(
        "rate_inequality",
        std::string("requires a grad_tol-terminated run, got ") +
            to_string(traj.termination));
  }
  const int n = traj.n_iterates();
  // Suffix sums of the displacements ||x_{i+1} - x_i||.
  std::vector<double> suffix(n, 0.0);
  for (int i = n - 2; i >= 0; --i) {
    suffix[i] =
        suffix[i + 1] + (traj.iterates[i + 1] - traj.iterates[i]).norm();
  }

  double margin = std::numeric_limits<double>::infinity();
  std::string worst;
  double min_grad = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    min_grad = std::min(min_grad, traj.grad_norms[k]);
    const double rhs = (2.0 / alpha_lower) / (k + 2) * suffix[k / 2];
    const double m = (rhs - min_grad) / (1.0 + rhs);
    if (m < margin) {
      margin = m;
      worst = "k = " + std::to_string(k);
    }
  }
  return make_certificate(
      "rate_inequality", margin, 1e-12, worst,
      "tail truncated at run end; neglected motion <= grad_tol * sum alpha");
}

}  // namespace flowcert
