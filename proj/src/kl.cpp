#include "flowcert/kl.hpp"

#include <algorithm>
#include <cmath>

#include "flowcert/parallel.hpp"
#include "flowcert/rng.hpp"

namespace flowcert {

Desingularizer::Desingularizer(double c, double theta, double t_break)
    : c_(c), theta_(theta), t_break_(t_break) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("Desingularizer: c must be positive");
  }
  if (!(theta > 0.0) || theta > 1.0) {
    throw std::invalid_argument("Desingularizer: theta must lie in (0, 1]");
  }
  if (!(t_break > 0.0)) {
    throw std::invalid_argument("Desingularizer: t_break must be positive");
  }
  if (std::isfinite(t_break_)) {
    break_value_ = c_ * std::pow(t_break_, theta_);
    slope_ = c_ * theta_ * std::pow(t_break_, theta_ - 1.0);
  } else {
    break_value_ = std::numeric_limits<double>::infinity();
    slope_ = 0.0;
  }
}

double Desingularizer::value(double t) const {
  if (t < 0.0) throw std::invalid_argument("Desingularizer: negative argument");
  if (t <= t_break_) return c_ * std::pow(t, theta_);
  return break_value_ + slope_ * (t - t_break_);
}

double Desingularizer::deriv(double t) const {
  if (t < 0.0) throw std::invalid_argument("Desingularizer: negative argument");
  if (t == 0.0) {
    return theta_ < 1.0 ? std::numeric_limits<double>::infinity() : c_;
  }
  if (t <= t_break_) return c_ * theta_ * std::pow(t, theta_ - 1.0);
  return slope_;
}

double Desingularizer::inverse(double s) const {
  if (s < 0.0) throw std::invalid_argument("Desingularizer: negative argument");
  if (s <= break_value_) return std::pow(s / c_, 1.0 / theta_);
  return t_break_ + (s - break_value_) / slope_;
}

double f_tilde(double f_value, const std::vector<double>& V) {
  if (V.empty()) {
    throw std::invalid_argument(
        "f_tilde: V must be nonempty (supply {0} when unknown)");
  }
  double best = std::numeric_limits<double>::infinity();
  for (double v : V) best = std::min(best, std::abs(f_value - v));
  return best;
}

double f_tilde(const ObjectiveProblem& problem, const std::vector<double>& V,
               const Vector& x) {
  return f_tilde(eval_value(problem, x), V);
}

CertificateReport kl_check(const ObjectiveProblem& problem,
                           const Desingularizer& psi,
                           const std::vector<double>& V,
                           const std::vector<Vector>& samples) {
  if (V.empty()) {
    throw std::invalid_argument("kl_check: V must be nonempty");
  }
  double margin = std::numeric_limits<double>::infinity();
  std::string worst;
  int admitted = 0;
  for (const Vector& x : samples) {
    const Evaluation ev = eval_objective(problem, x);
    const double ft = f_tilde(ev.value, V);
    const double gn = ev.gradient.norm();
    if (ft == 0.0 || gn < 1e-12) continue;
    ++admitted;
    const double m = psi.deriv(ft) * gn - 1.0;
    if (m < margin) {
      margin = m;
      worst = "x = " + format_vector(x);
    }
  }
  if (admitted == 0) {
    return invalidated_certificate("kl_inequality",
                                   "no admissible sample (all critical-like)");
  }
  return make_certificate("kl_inequality", margin, 1e-9, worst,
                          std::to_string(admitted) + " of " +
                              std::to_string(samples.size()) +
                              " samples admitted");
}

namespace {

// Number of known critical values inside [lo, hi], with a small slack so
// boundary values count.
int critical_values_in_range(const std::vector<double>& V, double lo,
                             double hi) {
  const double slack = 1e-12 * (1.0 + std::max(std::abs(lo), std::abs(hi)));
  int n = 0;
  for (double v : V) n += (v >= lo - slack && v <= hi + slack) ? 1 : 0;
  return n;
}

}  // namespace

CertificateReport continuous_length_certificate(
    const FlowTrajectory& flow, const ObjectiveProblem& problem,
    const Desingularizer& psi, int m, std::optional<double> tolerance,
    const std::optional<Region>& region) {
  if (m < 1) {
    throw std::invalid_argument("continuous_length_certificate: m must be >= 1");
  }
  if (flow.states.empty()) {
    return invalidated_certificate("length_continuous", "empty flow");
  }
  if (region) {
    for (std::size_t i = 0; i < flow.states.size(); ++i) {
      if (!region->contains(flow.states[i], 1e-9)) {
        return invalidated_certificate(
            "length_continuous",
            "flow left the certified region at t = " +
                std::to_string(flow.times[i]));
      }
    }
  }
  const double budget = tolerance.value_or(100.0 * flow.rel_tol);
  const double f0 = flow.f_values.front();
  const double f1 = flow.f_values.back();
  double drop = f0 - f1;
  if (drop < -budget) {
    return invalidated_certificate(
        "length_continuous",
        "f increased along the flow by " + std::to_string(-drop) +
            "; inconsistent integrator output");
  }
  drop = std::max(drop, 0.0);

  if (!problem.critical_values.empty()) {
    const auto [lo, hi] =
        std::minmax_element(flow.f_values.begin(), flow.f_values.end());
    const int needed =
        critical_values_in_range(problem.critical_values, *lo, *hi);
    if (m < needed) {
      return invalidated_certificate(
          "length_continuous",
          "m = " + std::to_string(m) + " but " + std::to_string(needed) +
              " known critical values lie in the observed f-range");
    }
  }

  const double lhs = flow.arc_length / (2.0 * m);
  const double rhs = psi.value(drop / (2.0 * m));
  return make_certificate("length_continuous", rhs - lhs, budget,
                          "t_end = " + std::to_string(flow.t_end()),
                          "lhs = " + std::to_string(lhs) +
                              ", rhs = " + std::to_string(rhs));
}

CertificateReport discrete_length_certificate(
    const DiscreteTrajectory& traj, const ObjectiveProblem& problem,
    const Desingularizer& psi, int m, double eps, double L, double M,
    const Region& region, double tolerance) {
  if (m < 1 || !(eps > 0.0) || !(L > 0.0) || !(M > 0.0)) {
    throw std::invalid_argument(
        "discrete_length_certificate: need m >= 1 and eps, L, M > 0");
  }
  const int n = traj.n_iterates();
  if (n == 0) {
    return invalidated_certificate("length_discrete", "empty trajectory");
  }

  const double alpha_cap = std::min(1.0 / L, 2.0 * eps / ((6.0 + eps) * M));
  double max_alpha = 0.0;
  for (double a : traj.steps) max_alpha = std::max(max_alpha, a);
  if (max_alpha > alpha_cap * (1.0 + 1e-12)) {
    return invalidated_certificate(
        "length_discrete", "max step " + std::to_string(max_alpha) +
                               " exceeds the proposition threshold " +
                               std::to_string(alpha_cap));
  }
  // x_0, ..., x_K must lie in the certified region; only the final iterate
  // x_{K+1} may leave it.
  for (int i = 0; i + 1 < n; ++i) {
    if (!region.contains(traj.iterates[i], 1e-12)) {
      return invalidated_certificate(
          "length_discrete", "iterate " + std::to_string(i) +
                                 " lies outside the certified region " +
                                 region.describe());
    }
  }

  if (!problem.critical_values.empty()) {
    const auto [lo, hi] =
        std::minmax_element(traj.f_values.begin(), traj.f_values.end());
    const int needed =
        critical_values_in_range(problem.critical_values, *lo, *hi);
    if (m < needed) {
      return invalidated_certificate(
          "length_discrete",
          "m = " + std::to_string(m) + " but " + std::to_string(needed) +
              " known critical values lie in the observed f-range");
    }
  }

  if (n == 1) {
    return make_certificate("length_discrete", 0.0, tolerance, "",
                            "single iterate");
  }

  // Monotonicity f(x_0) >= ... >= f(x_{K+1}) is part of the conclusion.
  for (int i = 0; i + 1 < n; ++i) {
    const double slack = 1e-12 * (1.0 + std::abs(traj.f_values[i]));
    if (traj.f_values[i + 1] > traj.f_values[i] + slack) {
      CertificateReport r = make_certificate(
          "length_discrete", traj.f_values[i] - traj.f_values[i + 1],
          tolerance, "iterate " + std::to_string(i + 1),
          "f increased between iterates");
      r.pass = false;
      return r;
    }
  }

  const int K = n - 2;  // iterates are x_0 .. x_{K+1}
  const double total = traj.length();
  const double drop = std::max(traj.f_values[0] - traj.f_values[K], 0.0);
  const double lhs = total / ((2.0 + eps) * m);
  const double rhs =
      psi.value(drop / (2.0 * m)) + 2.0 * L / (2.0 + eps) * max_alpha;
  return make_certificate("length_discrete", rhs - lhs, tolerance,
                          "K = " + std::to_string(K),
                          "lhs = " + std::to_string(lhs) +
                              ", rhs = " + std::to_string(rhs));
}

CertificateReport descent_lemma_check(const DiscreteTrajectory& traj,
                                      const ObjectiveProblem& problem,
                                      double M, double tolerance) {
  (void)problem;
  if (!(M > 0.0)) {
    throw std::invalid_argument("descent_lemma_check: M must be positive");
  }
  const int n = traj.n_iterates();
  if (n < 2) {
    return make_certificate("descent_lemmas", 0.0, tolerance, "",
                            "no steps to check");
  }
  double margin = std::numeric_limits<double>::infinity();
  std::string worst;
  for (int k = 0; k + 1 < n; ++k) {
    const double a = traj.steps[k];
    if (M * a >= 2.0) {
      return invalidated_certificate(
          "descent_lemmas", "M alpha_k >= 2 at k = " + std::to_string(k));
    }
    const double move = (traj.iterates[k + 1] - traj.iterates[k]).norm();
    const double drop = traj.f_values[k] - traj.f_values[k + 1];
    const double scale = 1.0 + std::abs(drop);
    const double m1 =
        (2.0 / (2.0 - M * a) * drop - move * traj.grad_norms[k]) / scale;
    const double m2 = ((2.0 + 2.0 * M * a) / (2.0 - M * a) * drop -
                       move * traj.grad_norms[k + 1]) /
                      scale;
    const double m = std::min(m1, m2);
    if (m < margin) {
      margin = m;
      worst = "k = " + std::to_string(k);
    }
  }
  return make_certificate("descent_lemmas", margin, tolerance, worst);
}

DecreaseResult uniform_decrease_experiment(const ObjectiveProblem& problem,
                                           double alpha, int n_inits,
                                           std::uint64_t seed,
                                           double init_radius,
                                           double exit_radius,
                                           long long max_iter, int threads) {
  if (problem.name != "cubic_saddle") {
    throw std::invalid_argument(
        "uniform_decrease_experiment: requires the catalog cubic");
  }
  if (!(alpha > 0.0) || alpha > 1e-4) {
    throw std::invalid_argument(
        "uniform_decrease_experiment: alpha must lie in (0, 1e-4]");
  }
  if (n_inits < 1) {
    throw std::invalid_argument("uniform_decrease_experiment: n_inits >= 1");
  }

  const Desingularizer psi(3.0, 1.0 / 3.0);
  DecreaseResult result;
  result.threshold = 2.0 * psi.inverse(1.0 / 9.0);
  result.runs.resize(n_inits);

  parallel_for(n_inits, threads, [&](int i) {
    Rng rng = Rng::child(seed, static_cast<std::uint64_t>(i));
    // Rejection-sample an initial point below the critical value.
    Vector x0;
    double f0 = 0.0;
    do {
      x0 = rng.in_ball(Vector::Zero(2), init_radius);
      f0 = eval_value(problem, x0);
    } while (!(f0 < 0.0));

    // Plain constant-step loop; run_gd's per-iterate bookkeeping would
    // dominate at these iteration counts.
    Vector x = x0;
    long long k = 0;
    bool exited = false;
    for (; k < max_iter; ++k) {
      if (x.squaredNorm() > exit_radius * exit_radius) {
        exited = true;
        break;
      }
      const double g0 = 3.0 * x[0] * x[0] - 2.0 * x[0] * x[1];
      const double g1 = -x[0] * x[0];
      x[0] -= alpha * g0;
      x[1] -= alpha * g1;
    }
    DecreaseRun& run = result.runs[i];
    run.x0 = x0;
    run.f0 = f0;
    run.f_end = eval_value(problem, x);
    run.steps = k;
    run.exited = exited;
  });

  double margin = std::numeric_limits<double>::infinity();
  std::string worst;
  for (int i = 0; i < n_inits; ++i) {
    const DecreaseRun& run = result.runs[i];
    if (!run.exited) {
      ++result.n_not_exited;
      continue;
    }
    ++result.n_exited;
    const double decrease = run.f0 - run.f_end;
    if (decrease - result.threshold < margin) {
      margin = decrease - result.threshold;
      worst = "init " + std::to_string(i) + " at x0 = " + format_vector(run.x0);
    }
  }
  if (result.n_exited == 0) {
    result.certificate = invalidated_certificate(
        "uniform_decrease", "no run exited the ball within max_iter");
  } else {
    result.certificate = make_certificate(
        "uniform_decrease", margin, 0.0, worst,
        std::to_string(result.n_exited) + " exited, " +
            std::to_string(result.n_not_exited) + " did not; threshold = " +
            std::to_string(result.threshold));
  }
  return result;
}

CertificateReport cubic_gradient_inequality_check(
    const std::vector<Vector>& samples) {
  double margin = std::numeric_limits<double>::infinity();
  std::string worst;
  for (const Vector& x : samples) {
    if (x.size() != 2) {
      throw std::invalid_argument(
          "cubic_gradient_inequality_check: samples must be 2-d");
    }
    const double f = x[0] * x[0] * x[0] - x[0] * x[0] * x[1];
    const double g0 = 3.0 * x[0] * x[0] - 2.0 * x[0] * x[1];
    const double g1 = -x[0] * x[0];
    const double lhs = std::sqrt(g0 * g0 + g1 * g1);
    const double rhs = std::pow(std::abs(f), 2.0 / 3.0);
    const double m = lhs - rhs;
    if (m < margin) {
      margin = m;
      worst = "x = " + format_vector(x);
    }
  }
  if (samples.empty()) {
    return invalidated_certificate("cubic_gradient_inequality", "no samples");
  }
  return make_certificate("cubic_gradient_inequality", margin, 1e-12, worst,
                          std::to_string(samples.size()) + " samples");
}

}  // namespace flowcert
