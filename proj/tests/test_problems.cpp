#include <doctest.h>

#include <cmath>

#include "flowcert/flow.hpp"
#include "flowcert/problems.hpp"
#include "flowcert/rng.hpp"

using namespace flowcert;

TEST_CASE("make_problem rejects unknown ids and bad shapes") {
  CHECK_THROWS_AS(make_problem("banana"), std::invalid_argument);
  ProblemParams params;
  params.rank = 0;
  CHECK_THROWS_AS(make_problem("matrix_factorization", params),
                  std::invalid_argument);
}

TEST_CASE("catalog spot values") {
  Vector x(2);
  x << 0.5, 0.25;
  CHECK(eval_value(make_problem("cubic_saddle"), x) ==
        doctest::Approx(0.0625).epsilon(1e-14));

  Vector ones(2);
  ones << 1.0, 1.0;
  const Evaluation ev = eval_objective(make_problem("scalar_factorization"), ones);
  CHECK(ev.value == doctest::Approx(0.0));
  CHECK(ev.gradient.norm() == doctest::Approx(0.0));

  // M = I2, r = 1, X = (1,0)^T, Y = (1,0)^T: ||X Y^T - I||^2 = 1.
  ProblemParams params;
  params.target = Matrix::Identity(2, 2);
  params.rank = 1;
  const FactorizationInstance inst = factorization_instance(params);
  Matrix X(2, 1), Y(2, 1);
  X << 1, 0;
  Y << 1, 0;
  CHECK(eval_value(make_problem("matrix_factorization", params),
                   inst.pack(X, Y)) == doctest::Approx(1.0));
}

TEST_CASE("pack/unpack is a bitwise bijection") {
  const FactorizationInstance inst(default_factorization_target(), 2);
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector v = rng.normal_vector(inst.dim());
    const auto [X, Y] = inst.unpack(v);
    const Vector back = inst.pack(X, Y);
    CHECK(back == v);
  }
  Matrix bad(3, 1);
  bad.setZero();
  Matrix Y(2, 2);
  Y.setZero();
  CHECK_THROWS_AS(inst.pack(bad, Y), std::invalid_argument);
}

TEST_CASE("packed factorization gradient equals (2RY, 2R^T X) packed") {
  ProblemParams params;
  params.target = default_factorization_target();
  params.rank = 1;
  const FactorizationInstance inst = factorization_instance(params);
  const ObjectiveProblem problem = make_problem("matrix_factorization", params);
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector v = rng.in_ball(Vector::Zero(inst.dim()), 2.0);
    const auto [X, Y] = inst.unpack(v);
    const Matrix R = X * Y.transpose() - inst.target();
    const Vector expected = inst.pack(2.0 * R * Y, 2.0 * R.transpose() * X);
    CHECK((eval_gradient(problem, v) - expected).norm() <= 1e-14);
  }
}

TEST_CASE("factorization critical values from singular values") {
  // target diag(1.5, 0.5), r = 1: sigma = (1.5, 0.5), ||M||^2 = 2.5,
  // critical values {0.25, 2.25, 2.5}.
  const FactorizationInstance inst(default_factorization_target(), 1);
  const std::vector<double> v = inst.critical_values();
  REQUIRE(v.size() == 3);
  CHECK(v[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(2.25).epsilon(1e-12));
  CHECK(v[2] == doctest::Approx(2.5).epsilon(1e-12));

  // r = 2 adds the fully-kept subset: value 0.
  const FactorizationInstance full(default_factorization_target(), 2);
  CHECK(full.critical_values().front() == doctest::Approx(0.0));
}

TEST_CASE("spectral norm is dominated by the Frobenius norm") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix a(2, 2);
    for (int i = 0; i < 4; ++i) a(i / 2, i % 2) = rng.uniform(-3.0, 3.0);
    CHECK(spectral_norm(a) <= a.norm() + 1e-12);
  }
}

TEST_CASE("balance residual is zero at the initial state and detects drift") {
  Matrix X0(1, 1), Y0(1, 1);
  X0 << 2.0;
  Y0 << 1.0;
  CHECK(balance_residual(X0, Y0, X0, Y0) == 0.0);

  Matrix Xp(1, 1);
  Xp << 2.1;
  CHECK(balance_residual(Xp, Y0, X0, Y0) == doctest::Approx(0.41).epsilon(1e-12));

  Matrix bad(2, 1);
  bad.setZero();
  CHECK_THROWS_AS(balance_residual(bad, Y0, X0, Y0), std::invalid_argument);
}

TEST_CASE("balance invariant holds along integrated factorization flows") {
  Matrix target(1, 1);
  target << 1.0;
  const FactorizationInstance inst(target, 1);
  ProblemParams params;
  params.target = target;
  params.rank = 1;
  const ObjectiveProblem problem = make_problem("matrix_factorization", params);

  Vector x0(2);
  x0 << 2.0, 1.0;  // x^2 - y^2 = 3 along the whole flow
  const double rel_tol = 1e-8;
  const double horizon = 20.0;
  const FlowTrajectory flow = integrate_flow(problem, x0, horizon, rel_tol);
  double worst = 0.0;
  for (const Vector& s : flow.states) {
    worst = std::max(worst, balance_residual(inst, s, x0));
  }
  CHECK(worst <= 100.0 * rel_tol * (1.0 + horizon));
}

TEST_CASE("factorization boundedness bound") {
  Matrix target(1, 1);
  target << 1.0;
  const FactorizationInstance inst(target, 1);
  ProblemParams params;
  params.target = target;
  params.rank = 1;
  const ObjectiveProblem problem = make_problem("matrix_factorization", params);

  SUBCASE("scalar (2,1): bound 17 is tight at t = 0") {
    Vector x0(2);
    x0 << 2.0, 1.0;
    const FlowTrajectory flow = integrate_flow(problem, x0, 10.0, 1e-8);
    const CertificateReport cert = factorization_bound_check(flow, inst);
    CHECK(cert.pass);
    // At t = 0: x^4 + y^4 = 17 equals the bound exactly.
    const double lhs0 = std::pow(2.0, 4) + 1.0;
    CHECK(lhs0 == 17.0);
    // Strictly positive margin afterward.
    const Vector xe = flow.states.back();
    CHECK(std::pow(xe[0], 4) + std::pow(xe[1], 4) < 17.0);
  }

  SUBCASE("balanced global minimum stays at margin 0") {
    Vector x0(2);
    x0 << 1.0, 1.0;
    const FlowTrajectory flow = integrate_flow(problem, x0, 5.0, 1e-8);
    CHECK(flow.termination == FlowTrajectory::Termination::converged);
    const CertificateReport cert = factorization_bound_check(flow, inst);
    CHECK(cert.pass);
    CHECK(cert.margin == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("2x2 random instance, seed 7") {
    Rng rng = Rng::child(7, 0);
    Matrix t2(2, 2);
    for (int i = 0; i < 4; ++i) t2(i / 2, i % 2) = rng.uniform(-1.5, 1.5);
    ProblemParams p2;
    p2.target = t2;
    p2.rank = 1;
    const FactorizationInstance inst2 = factorization_instance(p2);
    const ObjectiveProblem prob2 = make_problem("matrix_factorization", p2);
    const Vector x0 = rng.in_ball(Vector::Zero(inst2.dim()), 1.5);
    const FlowTrajectory flow = integrate_flow(prob2, x0, 20.0, 1e-8);
    CHECK(factorization_bound_check(flow, inst2).pass);
  }
}
