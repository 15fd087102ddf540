#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "flowcert/descent.hpp"
#include "flowcert/flow.hpp"

namespace flowcert {

/// Concave strictly increasing bijection of [0, infinity) with psi(0) = 0,
/// of the form psi(t) = c t^theta on [0, t_break] extended affinely beyond
/// t_break with the matching one-sided slope. This is the Lojasiewicz power
/// family plus the affine-extension device; t_break = infinity gives a pure
/// power law.
class Desingularizer {
 public:
  Desingularizer(double c, double theta,
                 double t_break = std::numeric_limits<double>::infinity());

  double value(double t) const;
  double operator()(double t) const { return value(t); }

  /// One-sided derivative; +infinity at t = 0 when theta < 1.
  double deriv(double t) const;

  double inverse(double s) const;

  double coefficient() const { return c_; }
  double exponent() const { return theta_; }
  double break_point() const { return t_break_; }

 private:
  double c_;
  double theta_;
  double t_break_;
  double break_value_;  // psi(t_break)
  double slope_;        // c theta t_break^{theta-1}
};

/// Distance of f(x) to the set V of critical values, min_{v in V} |f(x) - v|.
/// V must be nonempty and sorted ascending.
double f_tilde(double f_value, const std::vector<double>& V);
double f_tilde(const ObjectiveProblem& problem, const std::vector<double>& V,
               const Vector& x);

/// Pointwise Kurdyka-Lojasiewicz check: at smooth non-critical points the
/// inequality d(0, partial(psi o f_tilde)(x)) >= 1 reads
/// psi'(f_tilde(x)) ||grad f(x)|| >= 1. Samples with f_tilde(x) = 0 or
/// ||grad f(x)|| < 1e-12, where the inequality is not asserted, are skipped.
/// margin = min over admitted samples of psi'(f_tilde) ||grad f|| - 1;
/// pass iff margin >= -1e-9.
CertificateReport kl_check(const ObjectiveProblem& problem,
                           const Desingularizer& psi,
                           const std::vector<double>& V,
                           const std::vector<Vector>& samples);

/// Continuous length certificate on a trajectory confined to a region where
/// psi desingularizes f and where f has at most m critical values:
///   arc_length / (2m) <= psi((f(x(0)) - f(x(T))) / (2m)).
/// The tolerance budget defaults to 100 * flow rel_tol. The report is
/// invalidated when f increased along the flow beyond the budget (integrator
/// fault) or when m is smaller than the count of known critical values inside
/// the observed f-range.
CertificateReport continuous_length_certificate(
    const FlowTrajectory& flow, const ObjectiveProblem& problem,
    const Desingularizer& psi, int m,
    std::optional<double> tolerance = std::nullopt,
    const std::optional<Region>& region = std::nullopt);

/// Discrete length certificate: with iterates x_0, ..., x_K in the certified
/// region (the final iterate x_{K+1} may lie anywhere) and steps below
/// alpha_bar = min(1/L, 2 eps / ((6 + eps) M)),
///   sum ||x_{k+1} - x_k|| / ((2 + eps) m)
///     <= psi((f(x_0) - f(x_K)) / (2m)) + 2 L max_k alpha_k / (2 + eps),
/// and f(x_0) >= ... >= f(x_{K+1}). Monotonicity failures fail the
/// certificate; precondition failures invalidate it.
CertificateReport discrete_length_certificate(
    const DiscreteTrajectory& traj, const ObjectiveProblem& problem,
    const Desingularizer& psi, int m, double eps, double L, double M,
    const Region& region, double tolerance = 1e-9);

/// Per-step descent inequalities used by the discrete length certificate:
///   ||x_{k+1}-x_k|| ||grad f(x_k)||    <= 2/(2 - M a_k) (f(x_k) - f(x_{k+1}))
///   ||x_{k+1}-x_k|| ||grad f(x_{k+1})|| <= (2+2M a_k)/(2 - M a_k) (f(x_k) - f(x_{k+1})).
CertificateReport descent_lemma_check(const DiscreteTrajectory& traj,
                                      const ObjectiveProblem& problem,
                                      double M, double tolerance = 1e-10);

struct DecreaseRun {
  Vector x0;
  double f0 = 0.0;
  double f_end = 0.0;
  long long steps = 0;
  bool exited = false;
};

struct DecreaseResult {
  CertificateReport certificate;
  double threshold = 0.0;  // 2 psi^{-1}(1/9) = 2/19683
  int n_exited = 0;
  int n_not_exited = 0;
  std::vector<DecreaseRun> runs;
};

/// Uniform-decrease experiment for the cubic x1^3 - x1^2 x2 with
/// psi(t) = 3 t^{1/3}: gradient descent runs started in B(0, init_radius)
/// below the critical value must lose at least 2 psi^{-1}(1/9) in f by the
/// time they exit B(0, exit_radius). Runs that never exit are counted
/// separately.
DecreaseResult uniform_decrease_experiment(const ObjectiveProblem& problem,
                                           double alpha, int n_inits,
                                           std::uint64_t seed,
                                           double init_radius = 0.3,
                                           double exit_radius = 0.8,
                                           long long max_iter = 20'000'000,
                                           int threads = 1);

/// Gradient inequality of the cubic x1^3 - x1^2 x2 on all of R^2:
///   ((3 x1^2 - 2 x1 x2)^2 + x1^4)^{1/2} >= |x1^3 - x1^2 x2|^{2/3}.
/// margin = min over samples of ||grad f|| - |f|^{2/3}; pass iff >= -1e-12.
CertificateReport cubic_gradient_inequality_check(
    const std::vector<Vector>& samples);

}  // namespace flowcert
