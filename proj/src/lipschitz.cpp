#include "flowcert/lipschitz.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

#include "flowcert/rng.hpp"

namespace flowcert {

LipschitzEstimate estimate_constants(const ObjectiveProblem& problem,
                                     const Region& region, int n_samples,
                                     std::uint64_t seed, double inflation) {
  if (n_samples < 2) {
    throw std::invalid_argument("estimate_constants: need n_samples >= 2");
  }
  if (region.dim() != problem.dim) {
    throw std::invalid_argument("estimate_constants: region/problem dimension mismatch");
  }
  if (!(inflation >= 1.0)) {
    throw std::invalid_argument("estimate_constants: inflation must be >= 1");
  }

  Rng rng = Rng::child(seed, 0x11B5C8);
  double max_grad = 0.0;
  double max_ratio = 0.0;

  Vector prev_x;
  Vector prev_g;
  for (int i = 0; i < n_samples; ++i) {
    const Vector x = rng.in_region(region);
    const Vector g = eval_gradient(problem, x);
    max_grad = std::max(max_grad, g.norm());

    if (i > 0) {
      const double d = (x - prev_x).norm();
      if (d > 0.0) max_ratio = std::max(max_ratio, (g - prev_g).norm() / d);
    }

    // A nearby partner probes local curvature, which distant pairs average
    // away. Flip the offset if it leaves the region.
    const double delta = 1e-4 * (1.0 + x.norm());
    Vector dir = rng.normal_vector(problem.dim);
    const double dn = dir.norm();
    if (dn > 0.0) {
      dir *= delta / dn;
      Vector y = x + dir;
      if (!region.contains(y)) y = x - dir;
      if (region.contains(y)) {
        const Vector gy = eval_gradient(problem, y);
        const double d = (y - x).norm();
        if (d > 0.0) max_ratio = std::max(max_ratio, (gy - g).norm() / d);
      }
    }

    if (problem.has_hessian()) {
      const Matrix h = eval_hessian(problem, x);
      const Eigen::SelfAdjointEigenSolver<Matrix> es(h);
      max_ratio = std::max(max_ratio, es.eigenvalues().cwiseAbs().maxCoeff());
    }

    prev_x = x;
    prev_g = g;
  }

  LipschitzEstimate est;
  est.L = inflation * max_grad;
  est.M = std::max(inflation * max_ratio, 1e-12);
  est.region = region;
  est.n_samples = n_samples;
  est.inflation = inflation;
  return est;
}

}  // namespace flowcert
