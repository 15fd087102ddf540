#pragma once

#include <string>
#include <utility>
#include <vector>

#include "flowcert/core.hpp"

namespace flowcert {

struct FlowTrajectory;

/// A low-rank factorization objective ||X Y^T - target||_F^2 over
/// (X, Y) in R^{m x r} x R^{n x r}, with the pair packed column-major into a
/// single flat vector so trajectory drivers stay shape-agnostic.
class FactorizationInstance {
 public:
  FactorizationInstance(Matrix target, int rank);

  const Matrix& target() const { return target_; }
  int rows() const { return static_cast<int>(target_.rows()); }
  int cols() const { return static_cast<int>(target_.cols()); }
  int rank() const { return rank_; }
  int dim() const { return (rows() + cols()) * rank_; }

  Vector pack(const Matrix& X, const Matrix& Y) const;
  std::pair<Matrix, Matrix> unpack(const Vector& v) const;

  double value(const Vector& v) const;
  Vector gradient(const Vector& v) const;
  Matrix hessian(const Vector& v) const;

  /// Critical values of the objective: ||target||_F^2 minus every subset sum
  /// of at most `rank` squared singular values, deduplicated and sorted.
  std::vector<double> critical_values() const;

 private:
  Matrix target_;
  int rank_;
};

struct ProblemParams {
  int dim = 2;                 // quadratic
  double target_value = 1.0;   // scalar_factorization target
  Matrix target;               // matrix_factorization target (default if empty)
  int rank = 1;                // matrix_factorization rank
};

/// Catalog ids: quadratic, cubic_saddle, negative_quartic,
/// scalar_factorization, matrix_factorization.
ObjectiveProblem make_problem(const std::string& id,
                              const ProblemParams& params = {});

std::vector<std::string> catalog_ids();

/// Default 2x2 matrix-factorization target, diag(1.5, 0.5).
Matrix default_factorization_target();

FactorizationInstance factorization_instance(const ProblemParams& params);

/// Largest singular value.
double spectral_norm(const Matrix& a);

/// Frobenius norm of (X^T X - Y^T Y) - (X0^T X0 - Y0^T Y0); the balance
/// quantity X^T X - Y^T Y is conserved along exact factorization flows.
double balance_residual(const Matrix& X, const Matrix& Y, const Matrix& X0,
                        const Matrix& Y0);

double balance_residual(const FactorizationInstance& inst, const Vector& state,
                        const Vector& state0);

/// Checks, at every accepted state of a factorization flow,
///   ||X||_2^4 + ||Y||_2^4 <= ||X0^T X0 - Y0^T Y0||_F^2
///                            + 2 (||X0 Y0^T - target||_F + ||target||_F)^2.
CertificateReport factorization_bound_check(const FlowTrajectory& flow,
                                            const FactorizationInstance& inst,
                                            double tolerance = 1e-6);

}  // namespace flowcert
