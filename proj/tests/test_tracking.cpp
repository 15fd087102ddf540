#include <doctest.h>

#include <cmath>

#include "flowcert/problems.hpp"
#include "flowcert/rng.hpp"
#include "flowcert/tracking.hpp"

using namespace flowcert;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

TrackingSetup setup_with(double eps, double T, double L, double M,
                         Region region) {
  TrackingSetup s;
  s.epsilon = eps;
  s.horizon = T;
  s.lipschitz.L = L;
  s.lipschitz.M = M;
  s.lipschitz.region = std::move(region);
  return s;
}

}  // namespace

TEST_CASE("alpha_bar closed-form values") {
  CHECK(alpha_bar(0.1, 1.0, 1.0, 1.0) ==
        doctest::Approx(0.2 / M_E).epsilon(1e-15));
  CHECK(alpha_bar(0.5, 1.0, 2.0, 1.0) ==
        doctest::Approx(0.5 / M_E).epsilon(1e-15));
  CHECK(alpha_bar(0.1, 1.0, 1.0, 1.0) == doctest::Approx(0.0735759).epsilon(1e-6));

  // Strictly increasing in epsilon, strictly decreasing in T, L, M.
  const double base = alpha_bar(0.1, 1.0, 1.0, 1.0);
  CHECK(alpha_bar(0.2, 1.0, 1.0, 1.0) > base);
  CHECK(alpha_bar(0.1, 2.0, 1.0, 1.0) < base);
  CHECK(alpha_bar(0.1, 1.0, 2.0, 1.0) < base);
  CHECK(alpha_bar(0.1, 1.0, 1.0, 2.0) < base);

  CHECK_THROWS_AS(alpha_bar(1.0, 1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(alpha_bar(0.1, 0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(alpha_bar(0.1, 1.0, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("quadratic tracking stays within epsilon") {
  const ObjectiveProblem quad = make_problem("quadratic");
  const TrackingSetup setup =
      setup_with(0.1, 1.0, 1.0, 1.0, Region::ball(Vector::Zero(2), 2.0));
  const double alpha = 0.0735;  // just below alpha_bar = 0.0735759
  const TrackingReport report = tracking_deviation(
      quad, vec2(1.0, 0.0), StepSchedule::constant(alpha), setup, 1e-8);
  REQUIRE(!report.invalidated);
  CHECK(report.pass);
  CHECK(report.max_deviation <= 0.1);
  CHECK(report.deviations.front() == 0.0);
  // Closed-form oracle: x_k = (1-a)^k e_1 and x(t_k) = e^{-t_k} e_1.
  for (std::size_t k = 0; k < report.times.size(); ++k) {
    const double expected =
        std::abs(std::pow(1.0 - alpha, k) - std::exp(-report.times[k]));
    CHECK(report.deviations[k] == doctest::Approx(expected).epsilon(1e-4));
  }
}

TEST_CASE("vanishing steps track tightly") {
  const ObjectiveProblem quad = make_problem("quadratic");
  const TrackingSetup setup =
      setup_with(0.1, 1.0, 1.0, 1.0, Region::ball(Vector::Zero(2), 2.0));
  const TrackingReport report = tracking_deviation(
      quad, vec2(1.0, 0.0), StepSchedule::constant(1e-6), setup, 1e-8);
  REQUIRE(!report.invalidated);
  CHECK(report.max_deviation <= 1e-4);
}

TEST_CASE("critical initial point has zero deviations") {
  const ObjectiveProblem cubic = make_problem("cubic_saddle");
  const TrackingSetup setup =
      setup_with(0.1, 0.5, 4.0, 9.0, Region::ball(Vector::Zero(2), 0.8));
  const double alpha = alpha_bar(0.1, 0.5, 4.0, 9.0);
  const TrackingReport report = tracking_deviation(
      cubic, vec2(0.0, 0.0), StepSchedule::constant(alpha), setup, 1e-8);
  REQUIRE(!report.invalidated);
  CHECK(report.max_deviation == 0.0);
}

TEST_CASE("schedule above alpha_bar invalidates the report") {
  const ObjectiveProblem quad = make_problem("quadratic");
  const TrackingSetup setup =
      setup_with(0.1, 1.0, 1.0, 1.0, Region::ball(Vector::Zero(2), 2.0));
  const TrackingReport report = tracking_deviation(
      quad, vec2(1.0, 0.0), StepSchedule::constant(0.1), setup, 1e-8);
  CHECK(report.invalidated);
  CHECK(!report.pass);
}

TEST_CASE("leaving the certified region invalidates the report") {
  const ObjectiveProblem quad = make_problem("quadratic");
  // Region so small that x0 itself is outside.
  const TrackingSetup setup =
      setup_with(0.1, 1.0, 1.0, 1.0, Region::ball(Vector::Zero(2), 0.1));
  const TrackingReport report = tracking_deviation(
      quad, vec2(1.0, 0.0), StepSchedule::constant(0.01), setup, 1e-8);
  CHECK(report.invalidated);
}

TEST_CASE("not-lower-bounded problems use the single-point variant") {
  const ObjectiveProblem quartic = make_problem("negative_quartic");
  Vector x0(1);
  x0 << 0.5;  // blow-up at t = 2
  const TrackingSetup ok =
      setup_with(0.1, 1.0, 1.2, 3.6, Region::ball(Vector::Zero(1), 1.0));
  const double alpha = alpha_bar(0.1, 1.0, 1.2, 3.6);
  const TrackingReport report = tracking_deviation(
      quartic, x0, StepSchedule::constant(alpha), ok, 1e-8);
  CHECK(report.variant == "single_point_remark");
  REQUIRE(!report.invalidated);
  CHECK(report.pass);

  // Horizon past blow-up: hypotheses fail, report is invalidated.
  Vector x1(1);
  x1 << 1.0;  // blow-up at t = 0.5
  const TrackingSetup past =
      setup_with(0.1, 1.0, 1.2, 3.6, Region::ball(Vector::Zero(1), 2.0));
  const TrackingReport bad = tracking_deviation(
      quartic, x1, StepSchedule::constant(alpha), past, 1e-8);
  CHECK(bad.invalidated);
}

TEST_CASE("20 seeded configurations pass on quadratic and cubic") {
  struct Spec {
    ObjectiveProblem problem;
    Region region;
    double L, M;
    double x0_radius, eps_lo, eps_hi, t_lo, t_hi;
  };
  const ObjectiveProblem quad = make_problem("quadratic");
  const ObjectiveProblem cubic = make_problem("cubic_saddle");
  const Region cubic_region = Region::ball(Vector::Zero(2), 0.8);
  const LipschitzEstimate cubic_lip =
      estimate_constants(cubic, cubic_region, 2000, 11);
  const std::vector<Spec> specs = {
      {quad, Region::ball(Vector::Zero(2), 2.0), 2.0, 1.0, 1.0, 0.05, 0.3, 0.5,
       2.0},
      {cubic, cubic_region, cubic_lip.L, cubic_lip.M, 0.2, 0.05, 0.15, 0.3,
       0.6},
  };
  for (const Spec& spec : specs) {
    for (int i = 0; i < 20; ++i) {
      Rng rng = Rng::child(17, i);
      TrackingSetup setup = setup_with(
          rng.uniform(spec.eps_lo, spec.eps_hi), rng.uniform(spec.t_lo, spec.t_hi),
          spec.L, spec.M, spec.region);
      const Vector x0 =
          rng.in_ball(Vector::Zero(spec.problem.dim), spec.x0_radius);
      const double alpha =
          alpha_bar(setup.epsilon, setup.horizon, spec.L, spec.M);
      const TrackingReport report = tracking_deviation(
          spec.problem, x0, StepSchedule::constant(alpha), setup, 1e-8);
      CAPTURE(spec.problem.name);
      CAPTURE(i);
      REQUIRE(!report.invalidated);
      CHECK(report.pass);
    }
  }
}

TEST_CASE("tracking passes on the remaining catalog problems") {
  // Factorization objectives have large M on their working regions, so the
  // horizon must keep M T moderate or alpha_bar = 2 eps e^{-MT}/(LMT)
  // collapses; the quartic uses the single-point variant below blow-up.
  struct Spec {
    ObjectiveProblem problem;
    Region region;
    double x0_radius, eps_lo, eps_hi, t_lo, t_hi;
  };
  const std::vector<Spec> specs = {
      {make_problem("negative_quartic"), Region::ball(Vector::Zero(1), 1.0),
       0.5, 0.05, 0.3, 0.3, 1.0},
      {make_problem("scalar_factorization"), Region::ball(Vector::Zero(2), 2.5),
       1.2, 0.05, 0.2, 0.05, 0.15},
      {make_problem("matrix_factorization"), Region::ball(Vector::Zero(4), 2.2),
       1.0, 0.05, 0.2, 0.05, 0.12},
  };
  for (const Spec& spec : specs) {
    const LipschitzEstimate lip =
        estimate_constants(spec.problem, spec.region, 3000, 13);
    for (int i = 0; i < 20; ++i) {
      Rng rng = Rng::child(59, i);
      TrackingSetup setup;
      setup.epsilon = rng.uniform(spec.eps_lo, spec.eps_hi);
      setup.horizon = rng.uniform(spec.t_lo, spec.t_hi);
      setup.lipschitz = lip;
      const Vector x0 =
          rng.in_ball(Vector::Zero(spec.problem.dim), spec.x0_radius);
      const double alpha =
          alpha_bar(setup.epsilon, setup.horizon, lip.L, lip.M);
      const TrackingReport report = tracking_deviation(
          spec.problem, x0, StepSchedule::constant(alpha), setup, 1e-8);
      CAPTURE(spec.problem.name);
      CAPTURE(i);
      CAPTURE(report.note);
      REQUIRE(!report.invalidated);
      CHECK(report.pass);
    }
  }
}

TEST_CASE("taylor residual bound along the quadratic flow") {
  const ObjectiveProblem quad = make_problem("quadratic");
  const FlowTrajectory flow = integrate_flow(quad, vec2(1.0, 0.0), 2.0, 1e-8);
  const Region region = Region::ball(Vector::Zero(2), 2.0);

  // Pinned pair s = 0, t = 0.1 from x0 = e_1: residual |e^{-0.1} - 1 + 0.1|
  // vs the bound (M L / 2) (0.1)^2 = 0.005.
  const double residual =
      (flow.state_at(0.1) - flow.state_at(0.0) - 0.1 * flow.deriv_at(0.0))
          .norm();
  CHECK(residual == doctest::Approx(std::exp(-0.1) - 0.9).epsilon(1e-4));
  CHECK(residual <= 0.005);

  const CertificateReport cert =
      taylor_residual_check(flow, 1.0, 1.0, 200, 21, region);
  CHECK(!cert.invalidated);
  CHECK(cert.pass);
}

TEST_CASE("taylor residual bound along a cubic flow with sampled constants") {
  const ObjectiveProblem cubic = make_problem("cubic_saddle");
  const FlowTrajectory flow =
      integrate_flow(cubic, vec2(0.5, -0.5), 2.0, 1e-8);
  const Region region = Region::ball(Vector::Zero(2), 0.8);
  const LipschitzEstimate lip = estimate_constants(cubic, region, 2000, 3);
  const CertificateReport cert =
      taylor_residual_check(flow, lip.L, lip.M, 300, 4, region);
  CHECK(!cert.invalidated);
  CHECK(cert.pass);
}
