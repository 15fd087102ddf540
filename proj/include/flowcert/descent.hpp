#pragma once

#include <functional>
#include <vector>

#include "flowcert/core.hpp"

namespace flowcert {

/// Step sizes alpha_k for the gradient method. Every emitted step satisfies
/// 0 < alpha_k <= alpha_upper, and alpha_k >= alpha_lower when
/// alpha_lower > 0 (alpha_lower == 0 means "not bounded below").
class StepSchedule {
 public:
  static StepSchedule constant(double alpha);

  /// Explicit list of step sizes; runs longer than the list repeat its last
  /// value.
  static StepSchedule sequence(std::vector<double> alphas);

  static StepSchedule generator(std::function<double(int)> fn,
                                double alpha_upper, double alpha_lower = 0.0);

  /// Step size for iteration k. Throws if the underlying generator emits a
  /// value outside (0, alpha_upper] or below a positive alpha_lower.
  double alpha(int k) const;

  double alpha_upper() const { return alpha_upper_; }
  double alpha_lower() const { return alpha_lower_; }

 private:
  StepSchedule() = default;

  std::function<double(int)> fn_;
  double alpha_upper_ = 0.0;
  double alpha_lower_ = 0.0;
};

struct DiscreteTrajectory {
  enum class Termination { grad_tol, max_iter, escaped, nonfinite };

  std::vector<Vector> iterates;
  std::vector<double> steps;       // steps[k] produced iterates[k+1]
  std::vector<double> f_values;    // per iterate
  std::vector<double> grad_norms;  // per iterate
  std::vector<double> cum_length;  // per iterate; cum_length[0] == 0
  Termination termination = Termination::max_iter;
  double grad_tol = 0.0;
  double escape_radius = 0.0;

  int n_iterates() const { return static_cast<int>(iterates.size()); }
  double length() const { return cum_length.empty() ? 0.0 : cum_length.back(); }
  const Vector& last() const { return iterates.back(); }
};

const char* to_string(DiscreteTrajectory::Termination t);

/// Gradient method x_{k+1} = x_k - alpha_k grad f(x_k). Stops at the first
/// of: ||grad f(x_k)|| <= grad_tol, k == max_iter, ||x_k|| > escape_radius,
/// or a non-finite evaluation (recorded as a termination cause, not thrown).
DiscreteTrajectory run_gd(const ObjectiveProblem& problem, const Vector& x0,
                          const StepSchedule& schedule,
                          long long max_iter = 1'000'000,
                          double grad_tol = 1e-10,
                          double escape_radius = 1e6);

/// Rate certificate for runs with step sizes bounded below by alpha_lower:
/// for every k in the run,
///   min_{i<=k} ||grad f(x_i)||
///     <= (2/alpha_lower) / (k+2) * sum_{i=floor(k/2)}^{end} ||x_{i+1}-x_i||.
/// The infinite tail is truncated at the end of the run, so the certificate
/// is only asserted for runs that terminated at grad_tol, where the neglected
/// tail is negligible; other runs yield an invalidated report.
CertificateReport rate_certificate(const DiscreteTrajectory& traj,
                                   double alpha_lower);

}  // namespace flowcert
