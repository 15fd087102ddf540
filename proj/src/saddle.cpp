#include "flowcert/saddle.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

#include "flowcert/parallel.hpp"
#include "flowcert/rng.hpp"

namespace flowcert {

const char* to_string(SaddleReport::Kind k) {
  switch (k) {
    case SaddleReport::Kind::not_critical: return "not_critical";
    case SaddleReport::Kind::local_min_candidate: return "local_min_candidate";
    case SaddleReport::Kind::strict_saddle: return "strict_saddle";
    case SaddleReport::Kind::strict_max_candidate: return "strict_max_candidate";
    case SaddleReport::Kind::degenerate: return "degenerate";
  }
  return "?";
}

const char* to_string(SigmaMode m) {
  switch (m) {
    case SigmaMode::continuous: return "continuous";
    case SigmaMode::continuous_T: return "continuous_T";
    case SigmaMode::discrete: return "discrete";
  }
  return "?";
}

SaddleReport classify_critical_point(const ObjectiveProblem& problem,
                                     const Vector& x, double tol_grad,
                                     double tol_eig) {
  if (!(tol_grad > 0.0) || !(tol_eig > 0.0)) {
    throw std::invalid_argument("classify_critical_point: tolerances must be positive");
  }
  SaddleReport report;
  report.point = x;
  report.tol_grad = tol_grad;
  report.grad_norm = eval_gradient(problem, x).norm();

  const Matrix hess = problem.has_hessian()
                          ? eval_hessian(problem, x)
                          : finite_diff_hessian(problem, x, default_fd_step(x));
  const Eigen::SelfAdjointEigenSolver<Matrix> es(hess);
  report.eigenvalues = es.eigenvalues();

  const double scale = 1.0 + report.eigenvalues.cwiseAbs().maxCoeff();
  const double tol = tol_eig * scale;
  report.tol_eig = tol;

  if (report.grad_norm > tol_grad) {
    report.classification = SaddleReport::Kind::not_critical;
    return report;
  }

  int neg = 0, pos = 0;
  for (Eigen::Index i = 0; i < report.eigenvalues.size(); ++i) {
    if (report.eigenvalues[i] <= -tol) ++neg;
    if (report.eigenvalues[i] >= tol) ++pos;
  }
  const int zero = static_cast<int>(report.eigenvalues.size()) - neg - pos;
  if (neg == 0 && pos == 0) {
    report.classification = SaddleReport::Kind::degenerate;
  } else if (neg == 0) {
    report.classification = SaddleReport::Kind::local_min_candidate;
  } else if (pos == 0 && zero == 0) {
    report.classification = SaddleReport::Kind::strict_max_candidate;
  } else {
    report.classification = SaddleReport::Kind::strict_saddle;
  }
  return report;
}

EscapeResult escape_monte_carlo(const ObjectiveProblem& problem,
                                const Region& region, double alpha,
                                int n_trials, std::uint64_t seed,
                                const EscapeOptions& options) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("escape_monte_carlo: alpha must be positive");
  }
  if (n_trials < 1) {
    throw std::invalid_argument("escape_monte_carlo: n_trials must be >= 1");
  }
  if (region.dim() != problem.dim) {
    throw std::invalid_argument("escape_monte_carlo: region dimension mismatch");
  }

  EscapeResult result;
  result.n_trials = n_trials;
  result.reports.resize(n_trials);
  result.initial_points.resize(n_trials);
  std::vector<int> outcome(n_trials, 0);  // 0 converged, 1 max_iter, 2 unbounded

  const StepSchedule schedule = StepSchedule::constant(alpha);
  parallel_for(n_trials, options.threads, [&](int i) {
    Rng rng = Rng::child(seed, static_cast<std::uint64_t>(i));
    const Vector x0 = rng.in_region(region);
    result.initial_points[i] = x0;
    const DiscreteTrajectory traj =
        run_gd(problem, x0, schedule, options.max_iter, options.grad_tol,
               options.escape_radius);
    switch (traj.termination) {
      case DiscreteTrajectory::Termination::grad_tol: outcome[i] = 0; break;
      case DiscreteTrajectory::Termination::max_iter: outcome[i] = 1; break;
      default: outcome[i] = 2; break;
    }
    result.reports[i] =
        classify_critical_point(problem, traj.last(), options.grad_tol * 10.0);
  });

  for (int i = 0; i < n_trials; ++i) {
    if (outcome[i] == 0) {
      ++result.n_converged;
      if (result.reports[i].classification ==
          SaddleReport::Kind::strict_saddle) {
        ++result.n_saddle_limits;
      }
    } else if (outcome[i] == 1) {
      ++result.n_nonconverged;
    } else {
      ++result.n_unbounded;
    }
  }
  result.saddle_fraction =
      static_cast<double>(result.n_saddle_limits) / n_trials;
  return result;
}

SigmaEstimate estimate_sigma(const ObjectiveProblem& problem,
                             const Region& region, SigmaMode mode,
                             double alpha_bar, double horizon, int n_samples,
                             std::uint64_t seed, const SigmaOptions& options) {
  if (n_samples < 1) {
    throw std::invalid_argument("estimate_sigma: n_samples must be >= 1");
  }
  if (region.dim() != problem.dim) {
    throw std::invalid_argument("estimate_sigma: region dimension mismatch");
  }
  if (mode == SigmaMode::discrete && !(alpha_bar > 0.0)) {
    throw std::invalid_argument("estimate_sigma: discrete mode needs alpha_bar > 0");
  }
  if (mode == SigmaMode::continuous_T && !(horizon > 0.0)) {
    throw std::invalid_argument("estimate_sigma: continuous_T needs horizon > 0");
  }

  SigmaEstimate est;
  est.mode = mode;
  est.region = region;
  est.alpha_bar = alpha_bar;
  est.horizon = horizon;
  est.n_samples = n_samples;
  est.lengths.assign(n_samples, 0.0);

  std::vector<int> blew(n_samples, 0);
  std::vector<double> f0(n_samples, 0.0);

  // In continuous mode "run to convergence" still needs a finite integration
  // window; the cap is generous and a capped run only lowers the observed
  // lower bound.
  const double flow_horizon =
      mode == SigmaMode::continuous_T
          ? horizon
          : (horizon > 0.0 ? horizon : 1e4);

  parallel_for(n_samples, options.threads, [&](int i) {
    Rng rng = Rng::child(seed, static_cast<std::uint64_t>(i));
    const Vector x0 = rng.in_region(region);
    f0[i] = eval_value(problem, x0);
    if (mode == SigmaMode::discrete) {
      auto steps = [seed, i, alpha_bar](int k) {
        // Uniform in (0, alpha_bar]; replayable pure function of (i, k).
        const double u = Rng::indexed_uniform(seed, 0x51D3A + i, k);
        return alpha_bar * (1.0 - u);
      };
      const StepSchedule schedule =
          StepSchedule::generator(steps, alpha_bar, 0.0);
      DiscreteTrajectory traj;
      try {
        traj = run_gd(problem, x0, schedule, options.max_iter,
                      options.grad_tol, options.escape_radius);
      } catch (const NonFiniteError&) {
        blew[i] = 1;
        return;
      }
      if (traj.termination == DiscreteTrajectory::Termination::escaped ||
          traj.termination == DiscreteTrajectory::Termination::nonfinite) {
        blew[i] = 1;
      }
      est.lengths[i] = traj.length();
    } else {
      FlowTrajectory flow;
      try {
        flow = integrate_flow(problem, x0, flow_horizon, options.flow_rel_tol,
                              options.escape_radius);
      } catch (const NonFiniteError&) {
        blew[i] = 1;
        return;
      }
      if (flow.termination == FlowTrajectory::Termination::blowup ||
          flow.termination == FlowTrajectory::Termination::nonfinite) {
        blew[i] = 1;
      }
      est.lengths[i] = flow.arc_length;
    }
  });

  double sup_f_observed = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_samples; ++i) {
    sup_f_observed = std::max(sup_f_observed, f0[i]);
    if (blew[i]) {
      est.blowup = true;
      if (est.note.empty()) {
        est.note = "unbounded trajectory at sample " + std::to_string(i) +
                   "; the supremum is infinite on this region";
      }
    }
    if (est.lengths[i] > est.max_length) {
      est.max_length = est.lengths[i];
      est.argmax = i;
    }
  }

  if (mode == SigmaMode::continuous_T && !est.blowup &&
      !problem.critical_values.empty()) {
    const double sup_f = options.sup_f.value_or(sup_f_observed);
    const double m_f = problem.critical_values.front();
    if (sup_f >= m_f) {
      est.analytic_bound = std::sqrt(horizon * (sup_f - m_f));
      est.bound_holds =
          est.max_length <= *est.analytic_bound + 100.0 * options.flow_rel_tol;
      est.note = options.sup_f ? "sup_f supplied" : "sup_f from samples";
    }
  }
  return est;
}

}  // namespace flowcert
