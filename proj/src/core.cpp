#include "flowcert/core.hpp"

#include <cmath>

namespace flowcert {

namespace {

void check_input(const ObjectiveProblem& problem, const Vector& x) {
  if (static_cast<int>(x.size()) != problem.dim) {
    throw std::invalid_argument("eval: point has dimension " +
                                std::to_string(x.size()) + ", problem '" +
                                problem.name + "' expects " +
                                std::to_string(problem.dim));
  }
  if (!all_finite(x)) {
    throw std::invalid_argument("eval: point has non-finite entries");
  }
}

}  // namespace

Evaluation eval_objective(const ObjectiveProblem& problem, const Vector& x) {
  check_input(problem, x);
  Evaluation out;
  out.value = problem.value(x);
  out.gradient = problem.gradient(x);
  if (!std::isfinite(out.value) || !all_finite(out.gradient)) {
    throw NonFiniteError("non-finite f or grad f at x = " + format_vector(x) +
                         " on problem '" + problem.name + "'");
  }
  return out;
}

double eval_value(const ObjectiveProblem& problem, const Vector& x) {
  check_input(problem, x);
  const double v = problem.value(x);
  if (!std::isfinite(v)) {
    throw NonFiniteError("non-finite f at x = " + format_vector(x));
  }
  return v;
}

Vector eval_gradient(const ObjectiveProblem& problem, const Vector& x) {
  check_input(problem, x);
  Vector g = problem.gradient(x);
  if (!all_finite(g)) {
    throw NonFiniteError("non-finite grad f at x = " + format_vector(x));
  }
  return g;
}

Matrix eval_hessian(const ObjectiveProblem& problem, const Vector& x) {
  check_input(problem, x);
  if (!problem.has_hessian()) {
    throw std::invalid_argument("problem '" + problem.name +
                                "' has no analytic Hessian");
  }
  Matrix h = problem.hessian(x);
  if (!all_finite(h)) {
    throw NonFiniteError("non-finite Hessian at x = " + format_vector(x));
  }
  return h;
}

double default_fd_step(const Vector& x) { return 1e-6 * (1.0 + x.norm()); }

Vector finite_diff_gradient(const ObjectiveProblem& problem, const Vector& x,
                            double h) {
  check_input(problem, x);
  if (!(h > 0.0)) {
    throw std::invalid_argument("finite_diff_gradient: h must be positive");
  }
  Vector g(problem.dim);
  Vector xp = x, xm = x;
  for (int i = 0; i < problem.dim; ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = (eval_value(problem, xp) - eval_value(problem, xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return g;
}

Matrix finite_diff_hessian(const ObjectiveProblem& problem, const Vector& x,
                           double h) {
  check_input(problem, x);
  if (!(h > 0.0)) {
    throw std::invalid_argument("finite_diff_hessian: h must be positive");
  }
  const int n = problem.dim;
  Matrix hess(n, n);
  const double f0 = eval_value(problem, x);
  Vector p = x;
  for (int i = 0; i < n; ++i) {
    p[i] = x[i] + h;
    const double fp = eval_value(problem, p);
    p[i] = x[i] - h;
    const double fm = eval_value(problem, p);
    p[i] = x[i];
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    for (int j = i + 1; j < n; ++j) {
      p[i] = x[i] + h;
      p[j] = x[j] + h;
      const double fpp = eval_value(problem, p);
      p[j] = x[j] - h;
      const double fpm = eval_value(problem, p);
      p[i] = x[i] - h;
      const double fmm = eval_value(problem, p);
      p[j] = x[j] + h;
      const double fmp = eval_value(problem, p);
      p[i] = x[i];
      p[j] = x[j];
      const double v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }
  return hess;
}

}  // namespace flowcert
