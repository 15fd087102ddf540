#include <doctest.h>

#include "flowcert/lipschitz.hpp"
#include "flowcert/problems.hpp"

using namespace flowcert;

TEST_CASE("quadratic constants on B(0,2): L near 2, M exactly inflated 1") {
  const ObjectiveProblem quad = make_problem("quadratic");
  const Region ball = Region::ball(Vector::Zero(2), 2.0);
  const LipschitzEstimate est = estimate_constants(quad, ball, 10000, 123);
  // sup ||grad f|| = 2 on the ball; the sampled max approaches it from below
  // and the 1.2 inflation pushes the estimate above the true constant.
  CHECK(est.L >= 2.0);
  CHECK(est.L <= 2.4);
  // grad f = x: every difference quotient is exactly 1, Hessian is I.
  CHECK(est.M >= 1.0);
  CHECK(est.M <= 1.2 + 1e-12);
  CHECK(est.M == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("affine objective: constant gradient, M floored") {
  ObjectiveProblem linear;
  linear.name = "linear";
  linear.dim = 2;
  linear.value = [](const Vector& x) { return x[0]; };
  linear.gradient = [](const Vector&) {
    Vector g(2);
    g << 1.0, 0.0;
    return g;
  };
  const Region ball = Region::ball(Vector::Zero(2), 3.0);
  const LipschitzEstimate est = estimate_constants(linear, ball, 500, 5);
  CHECK(est.L == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(est.M == 1e-12);
}

TEST_CASE("same seed gives bit-identical estimates") {
  const ObjectiveProblem cubic = make_problem("cubic_saddle");
  const Region ball = Region::ball(Vector::Zero(2), 0.8);
  const LipschitzEstimate a = estimate_constants(cubic, ball, 2000, 99);
  const LipschitzEstimate b = estimate_constants(cubic, ball, 2000, 99);
  CHECK(a.L == b.L);
  CHECK(a.M == b.M);
}

TEST_CASE("estimates are nondecreasing in the sample count") {
  const ObjectiveProblem cubic = make_problem("cubic_saddle");
  const Region ball = Region::ball(Vector::Zero(2), 0.8);
  const LipschitzEstimate small = estimate_constants(cubic, ball, 200, 31);
  const LipschitzEstimate large = estimate_constants(cubic, ball, 2000, 31);
  CHECK(large.L >= small.L);
  CHECK(large.M >= small.M);
}

TEST_CASE("estimate_constants validates inputs") {
  const ObjectiveProblem quad = make_problem("quadratic");
  const Region ball = Region::ball(Vector::Zero(2), 1.0);
  CHECK_THROWS_AS(estimate_constants(quad, ball, 1, 0), std::invalid_argument);
  const Region wrong = Region::ball(Vector::Zero(3), 1.0);
  CHECK_THROWS_AS(estimate_constants(quad, wrong, 10, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(Region::ball(Vector::Zero(2), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Region::ball(Vector::Zero(2), -1.0), std::invalid_argument);
}

TEST_CASE("box regions sample within bounds") {
  const ObjectiveProblem quad = make_problem("quadratic");
  Vector hw(2);
  hw << 0.5, 2.0;
  const Region box = Region::box(Vector::Zero(2), hw);
  // sup ||grad f|| over the box is its circumradius.
  const LipschitzEstimate est = estimate_constants(quad, box, 5000, 17);
  CHECK(est.L <= 1.2 * box.circumradius() + 1e-12);
  CHECK(est.L >= 0.9 * box.circumradius());
}
