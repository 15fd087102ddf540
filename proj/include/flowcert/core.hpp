#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "flowcert/types.hpp"

namespace flowcert {

/// Lipschitz constants of f (L) and of its gradient (M), valid on `region`.
struct KnownLipschitz {
  double L = 0.0;
  double M = 0.0;
  Region region = Region::ball(Vector::Zero(1), 1.0);
};

/// An objective with analytic gradient and, where available, analytic
/// Hessian and known critical values. Evaluation closures must be pure; all
/// operations on a problem are safe to call concurrently.
struct ObjectiveProblem {
  std::string name;
  int dim = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;  // empty when unavailable
  std::vector<double> critical_values;           // sorted ascending; empty when unknown
  bool lower_bounded = true;
  std::optional<KnownLipschitz> known_lipschitz;

  bool has_hessian() const { return static_cast<bool>(hessian); }
};

struct Evaluation {
  double value = 0.0;
  Vector gradient;
};

/// Evaluates f and its gradient. Throws std::invalid_argument on a dimension
/// mismatch or non-finite input, and NonFiniteError when the outputs leave
/// the numerically safe domain.
Evaluation eval_objective(const ObjectiveProblem& problem, const Vector& x);

double eval_value(const ObjectiveProblem& problem, const Vector& x);
Vector eval_gradient(const ObjectiveProblem& problem, const Vector& x);

/// Analytic Hessian; throws std::invalid_argument when the problem has none.
Matrix eval_hessian(const ObjectiveProblem& problem, const Vector& x);

/// Default central-difference step: 1e-6 * (1 + ||x||), balancing truncation
/// against rounding at double precision.
double default_fd_step(const Vector& x);

/// Central-difference gradient, (f(x + h e_i) - f(x - h e_i)) / (2h).
Vector finite_diff_gradient(const ObjectiveProblem& problem, const Vector& x,
                            double h);

/// Second-order central-difference Hessian, exactly symmetric by
/// construction (upper triangle computed, then mirrored).
Matrix finite_diff_hessian(const ObjectiveProblem& problem, const Vector& x,
                           double h);

}  // namespace flowcert
