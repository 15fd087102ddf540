#include "flowcert/problems.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "flowcert/flow.hpp"

namespace flowcert {

FactorizationInstance::FactorizationInstance(Matrix target, int rank)
    : target_(std::move(target)), rank_(rank) {
  if (target_.size() == 0) {
    throw std::invalid_argument("FactorizationInstance: empty target");
  }
  if (!all_finite(target_)) {
    throw std::invalid_argument("FactorizationInstance: non-finite target");
  }
  if (rank_ < 1) {
    throw std::invalid_argument("FactorizationInstance: rank must be >= 1");
  }
}

Vector FactorizationInstance::pack(const Matrix& X, const Matrix& Y) const {
  if (X.rows() != rows() || X.cols() != rank_ || Y.rows() != cols() ||
      Y.cols() != rank_) {
    throw std::invalid_argument("pack: factor shape mismatch");
  }
  Vector v(dim());
  Eigen::Map<Matrix>(v.data(), rows(), rank_) = X;
  Eigen::Map<Matrix>(v.data() + rows() * rank_, cols(), rank_) = Y;
  return v;
}

std::pair<Matrix, Matrix> FactorizationInstance::unpack(const Vector& v) const {
  if (static_cast<int>(v.size()) != dim()) {
    throw std::invalid_argument("unpack: packed vector has wrong size");
  }
  Matrix X = Eigen::Map<const Matrix>(v.data(), rows(), rank_);
  Matrix Y = Eigen::Map<const Matrix>(v.data() + rows() * rank_, cols(), rank_);
  return {X, Y};
}

double FactorizationInstance::value(const Vector& v) const {
  auto [X, Y] = unpack(v);
  return (X * Y.transpose() - target_).squaredNorm();
}

Vector FactorizationInstance::gradient(const Vector& v) const {
  auto [X, Y] = unpack(v);
  const Matrix R = X * Y.transpose() - target_;
  return pack(2.0 * R * Y, 2.0 * R.transpose() * X);
}

Matrix FactorizationInstance::hessian(const Vector& v) const {
  // Bilinear form of the second derivative: for directions (U, V) and (U', V'),
  //   H[(U,V),(U',V')] = 2 <U Y^T + X V^T, U' Y^T + X V'^T>
  //                      + 2 <R, U V'^T + U' V^T>,   R = X Y^T - target.
  auto [X, Y] = unpack(v);
  const Matrix R = X * Y.transpose() - target_;
  const int n = dim();
  std::vector<Matrix> dU(n), dV(n);
  for (int i = 0; i < n; ++i) {
    Vector e = Vector::Zero(n);
    e[i] = 1.0;
    auto [U, V] = unpack(e);
    dU[i] = U * Y.transpose() + X * V.transpose();
    dV[i] = std::move(V);
  }
  Matrix H(n, n);
  for (int i = 0; i < n; ++i) {
    Vector ei = Vector::Zero(n);
    ei[i] = 1.0;
    auto [Ui, Vi] = unpack(ei);
    for (int j = i; j < n; ++j) {
      Vector ej = Vector::Zero(n);
      ej[j] = 1.0;
      auto [Uj, Vj] = unpack(ej);
      const double cross = (R.array() * (Ui * Vj.transpose() + Uj * Vi.transpose()).array()).sum();
      const double h = 2.0 * (dU[i].array() * dU[j].array()).sum() + 2.0 * cross;
      H(i, j) = h;
      H(j, i) = h;
    }
  }
  return H;
}

std::vector<double> FactorizationInstance::critical_values() const {
  Eigen::JacobiSVD<Matrix> svd(target_);
  const Vector sigma = svd.singularValues();
  const double total = sigma.squaredNorm();
  const int k = static_cast<int>(sigma.size());
  std::vector<double> values;
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    if (__builtin_popcount(mask) > rank_) continue;
    double kept = 0.0;
    for (int i = 0; i < k; ++i) {
      if (mask & (1u << i)) kept += sigma[i] * sigma[i];
    }
    values.push_back(total - kept);
  }
  std::sort(values.begin(), values.end());
  const double scale = 1.0 + std::abs(total);
  values.erase(std::unique(values.begin(), values.end(),
                           [scale](double a, double b) {
                             return std::abs(a - b) <= 1e-12 * scale;
                           }),
               values.end());
  return values;
}

Matrix default_factorization_target() {
  Matrix m(2, 2);
  m << 1.5, 0.0, 0.0, 0.5;
  return m;
}

FactorizationInstance factorization_instance(const ProblemParams& params) {
  Matrix target = params.target.size() ? params.target
                                       : default_factorization_target();
  return FactorizationInstance(std::move(target), params.rank);
}

namespace {

ObjectiveProblem make_quadratic(int dim) {
  if (dim < 1) throw std::invalid_argument("quadratic: dim must be >= 1");
  ObjectiveProblem p;
  p.name = "quadratic";
  p.dim = dim;
  p.value = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  p.gradient = [](const Vector& x) { return x; };
  p.hessian = [dim](const Vector&) {
    return Matrix(Matrix::Identity(dim, dim));
  };
  p.critical_values = {0.0};
  p.lower_bounded = true;
  p.known_lipschitz =
      KnownLipschitz{2.0, 1.0, Region::ball(Vector::Zero(dim), 2.0)};
  return p;
}

ObjectiveProblem make_cubic_saddle() {
  // f(x1, x2) = x1^3 - x1^2 x2. Critical set is the line x1 = 0 at value 0;
  // the origin has a vanishing Hessian.
  ObjectiveProblem p;
  p.name = "cubic_saddle";
  p.dim = 2;
  p.value = [](const Vector& x) {
    return x[0] * x[0] * x[0] - x[0] * x[0] * x[1];
  };
  p.gradient = [](const Vector& x) {
    Vector g(2);
    g[0] = 3.0 * x[0] * x[0] - 2.0 * x[0] * x[1];
    g[1] = -x[0] * x[0];
    return g;
  };
  p.hessian = [](const Vector& x) {
    Matrix h(2, 2);
    h << 6.0 * x[0] - 2.0 * x[1], -2.0 * x[0], -2.0 * x[0], 0.0;
    return h;
  };
  p.critical_values = {0.0};
  p.lower_bounded = false;
  return p;
}

ObjectiveProblem make_negative_quartic() {
  // f(x) = -x^4/4. Gradient trajectories from x0 != 0 blow up at time
  // x0^{-2}/2.
  ObjectiveProblem p;
  p.name = "negative_quartic";
  p.dim = 1;
  p.value = [](const Vector& x) { return -0.25 * std::pow(x[0], 4); };
  p.gradient = [](const Vector& x) {
    Vector g(1);
    g[0] = -x[0] * x[0] * x[0];
    return g;
  };
  p.hessian = [](const Vector& x) {
    Matrix h(1, 1);
    h(0, 0) = -3.0 * x[0] * x[0];
    return h;
  };
  p.critical_values = {0.0};
  p.lower_bounded = false;
  return p;
}

ObjectiveProblem make_scalar_factorization(double target) {
  // f(x, y) = (x y - target)^2. Minimum manifold x y = target at value 0 and
  // a strict saddle at the origin at value target^2.
  ObjectiveProblem p;
  p.name = "scalar_factorization";
  p.dim = 2;
  p.value = [target](const Vector& v) {
    const double r = v[0] * v[1] - target;
    return r * r;
  };
  p.gradient = [target](const Vector& v) {
    const double r = v[0] * v[1] - target;
    Vector g(2);
    g[0] = 2.0 * r * v[1];
    g[1] = 2.0 * r * v[0];
    return g;
  };
  p.hessian = [target](const Vector& v) {
    Matrix h(2, 2);
    h << 2.0 * v[1] * v[1], 4.0 * v[0] * v[1] - 2.0 * target,
        4.0 * v[0] * v[1] - 2.0 * target, 2.0 * v[0] * v[0];
    return h;
  };
  p.critical_values = {0.0, target * target};
  std::sort(p.critical_values.begin(), p.critical_values.end());
  p.lower_bounded = true;
  return p;
}

ObjectiveProblem make_matrix_factorization(const ProblemParams& params) {
  auto inst = std::make_shared<FactorizationInstance>(
      factorization_instance(params));
  ObjectiveProblem p;
  p.name = "matrix_factorization";
  p.dim = inst->dim();
  p.value = [inst](const Vector& v) { return inst->value(v); };
  p.gradient = [inst](const Vector& v) { return inst->gradient(v); };
  p.hessian = [inst](const Vector& v) { return inst->hessian(v); };
  p.critical_values = inst->critical_values();
  p.lower_bounded = true;
  return p;
}

}  // namespace

ObjectiveProblem make_problem(const std::string& id,
                              const ProblemParams& params) {
  if (id == "quadratic") return make_quadratic(params.dim);
  if (id == "cubic_saddle") return make_cubic_saddle();
  if (id == "negative_quartic") return make_negative_quartic();
  if (id == "scalar_factorization") {
    return make_scalar_factorization(params.target_value);
  }
  if (id == "matrix_factorization") return make_matrix_factorization(params);
  throw std::invalid_argument("unknown problem id '" + id + "'");
}

std::vector<std::string> catalog_ids() {
  return {"quadratic", "cubic_saddle", "negative_quartic",
          "scalar_factorization", "matrix_factorization"};
}

double spectral_norm(const Matrix& a) {
  return Eigen::JacobiSVD<Matrix>(a).singularValues()[0];
}

double balance_residual(const Matrix& X, const Matrix& Y, const Matrix& X0,
                        const Matrix& Y0) {
  if (X.rows() != X0.rows() || X.cols() != X0.cols() || Y.rows() != Y0.rows() ||
      Y.cols() != Y0.cols() || X.cols() != Y.cols()) {
    throw std::invalid_argument("balance_residual: shape mismatch");
  }
  const Matrix now = X.transpose() * X - Y.transpose() * Y;
  const Matrix init = X0.transpose() * X0 - Y0.transpose() * Y0;
  return (now - init).norm();
}

double balance_residual(const FactorizationInstance& inst, const Vector& state,
                        const Vector& state0) {
  auto [X, Y] = inst.unpack(state);
  auto [X0, Y0] = inst.unpack(state0);
  return balance_residual(X, Y, X0, Y0);
}

CertificateReport factorization_bound_check(const FlowTrajectory& flow,
                                            const FactorizationInstance& inst,
                                            double tolerance) {
  if (flow.states.empty()) {
    return invalidated_certificate("factorization_bound", "empty flow");
  }
  auto [X0, Y0] = inst.unpack(flow.states.front());
  const double balance0 = (X0.transpose() * X0 - Y0.transpose() * Y0).norm();
  const double resid0 = (X0 * Y0.transpose() - inst.target()).norm();
  const double bound =
      balance0 * balance0 +
      2.0 * std::pow(resid0 + inst.target().norm(), 2);

  double margin = std::numeric_limits<double>::infinity();
  std::string worst;
  for (std::size_t i = 0; i < flow.states.size(); ++i) {
    auto [X, Y] = inst.unpack(flow.states[i]);
    const double lhs =
        std::pow(spectral_norm(X), 4) + std::pow(spectral_norm(Y), 4);
    const double m = bound - lhs;
    if (m < margin) {
      margin = m;
      worst = "t = " + std::to_string(flow.times[i]);
    }
  }
  return make_certificate("factorization_bound", margin, tolerance, worst,
                          "bound = " + std::to_string(bound));
}

}  // namespace flowcert
