#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace flowcert {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Thrown when an evaluation produces NaN or infinity. Finite-time blow-up is
/// a meaningful outcome for gradient trajectories, so trajectory drivers catch
/// this and record it as a termination cause instead of letting NaN propagate.
struct NonFiniteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }
inline bool all_finite(const Matrix& m) { return m.allFinite(); }

/// Closed ball or axis-aligned box. Declares where Lipschitz constants are
/// estimated and where certificates are asserted to apply.
class Region {
 public:
  enum class Kind { ball, box };

  static Region ball(Vector center, double radius);
  static Region box(Vector center, Vector half_widths);

  Kind kind() const { return kind_; }
  const Vector& center() const { return center_; }
  double radius() const { return radius_; }
  const Vector& half_widths() const { return half_widths_; }
  int dim() const { return static_cast<int>(center_.size()); }

  bool contains(const Vector& x, double slack = 0.0) const;

  /// Radius of the smallest ball about the region's center containing it.
  double circumradius() const;

  std::string describe() const;

 private:
  Region() = default;

  Kind kind_ = Kind::ball;
  Vector center_;
  double radius_ = 0.0;
  Vector half_widths_;
};

/// Result of checking one inequality: the minimal normalized margin
/// (RHS - LHS) over all checked instances, the worst offender, and a pass
/// flag. `invalidated` marks reports whose preconditions failed; those are
/// neither passes nor failures and carry the reason in `note`.
struct CertificateReport {
  std::string name;
  double margin = 0.0;
  std::string worst;
  bool pass = false;
  double tolerance = 0.0;
  bool invalidated = false;
  std::string note;
};

inline CertificateReport make_certificate(std::string name, double margin,
                                          double tolerance,
                                          std::string worst = {},
                                          std::string note = {}) {
  CertificateReport r;
  r.name = std::move(name);
  r.margin = margin;
  r.tolerance = tolerance;
  r.pass = margin >= -tolerance;
  r.worst = std::move(worst);
  r.note = std::move(note);
  return r;
}

inline CertificateReport invalidated_certificate(std::string name,
                                                 std::string reason) {
  CertificateReport r;
  r.name = std::move(name);
  r.invalidated = true;
  r.pass = false;
  r.note = std::move(reason);
  return r;
}

std::string format_vector(const Vector& v);

}  // namespace flowcert
