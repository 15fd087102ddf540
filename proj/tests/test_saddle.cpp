#include <doctest.h>

#include <cmath>

#include "flowcert/problems.hpp"
#include "flowcert/rng.hpp"
#include "flowcert/saddle.hpp"

using namespace flowcert;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("classification at known catalog points") {
  const ObjectiveProblem sf = make_problem("scalar_factorization");
  const SaddleReport saddle = classify_critical_point(sf, vec2(0.0, 0.0));
  CHECK(saddle.classification == SaddleReport::Kind::strict_saddle);
  CHECK(saddle.eigenvalues[0] == doctest::Approx(-2.0));
  CHECK(saddle.eigenvalues[1] == doctest::Approx(2.0));

  const ObjectiveProblem quad = make_problem("quadratic");
  CHECK(classify_critical_point(quad, vec2(0.0, 0.0)).classification ==
        SaddleReport::Kind::local_min_candidate);

  const ObjectiveProblem cubic = make_problem("cubic_saddle");
  CHECK(classify_critical_point(cubic, vec2(0.0, 0.0)).classification ==
        SaddleReport::Kind::degenerate);

  CHECK(classify_critical_point(quad, vec2(1.0, 0.0)).classification ==
        SaddleReport::Kind::not_critical);

  ObjectiveProblem neg = make_problem("quadratic");
  neg.name = "negated quadratic";
  neg.value = [](const Vector& x) { return -0.5 * x.squaredNorm(); };
  neg.gradient = [](const Vector& x) { return Vector(-x); };
  neg.hessian = [](const Vector& x) {
    return Matrix(-Matrix::Identity(x.size(), x.size()));
  };
  CHECK(classify_critical_point(neg, vec2(0.0, 0.0)).classification ==
        SaddleReport::Kind::strict_max_candidate);

  CHECK_THROWS_AS(classify_critical_point(quad, vec2(0, 0), 0.0),
                  std::invalid_argument);
}

TEST_CASE("classification works from finite differences when needed") {
  ObjectiveProblem sf = make_problem("scalar_factorization");
  sf.hessian = nullptr;
  CHECK(classify_critical_point(sf, vec2(0.0, 0.0)).classification ==
        SaddleReport::Kind::strict_saddle);
}

TEST_CASE("the exact saddle is a fixed point of the update") {
  const ObjectiveProblem sf = make_problem("scalar_factorization");
  const DiscreteTrajectory traj = run_gd(sf, vec2(0.0, 0.0),
                                         StepSchedule::constant(0.01), 1000,
                                         1e-12, 10.0);
  CHECK(traj.n_iterates() == 1);
  CHECK(classify_critical_point(sf, traj.last()).classification ==
        SaddleReport::Kind::strict_saddle);
}

TEST_CASE("escape Monte Carlo on the scalar factorization") {
  const ObjectiveProblem sf = make_problem("scalar_factorization");
  EscapeOptions opts;
  opts.grad_tol = 1e-8;
  opts.max_iter = 100000;
  const EscapeResult result = escape_monte_carlo(
      sf, Region::ball(Vector::Zero(2), 2.0), 0.01, 200, 77, opts);
  CHECK(result.n_unbounded == 0);
  CHECK(result.saddle_fraction <= 0.01);

  // Every converged limit is on the minimum manifold or at the saddle.
  for (int i = 0; i < result.n_trials; ++i) {
    const SaddleReport& r = result.reports[i];
    if (r.grad_norm > 1e-8) continue;
    const double xy = r.point[0] * r.point[1];
    const bool on_manifold = std::abs(xy - 1.0) <= 1e-4;
    const bool at_saddle = r.point.norm() <= 1e-4;
    CHECK((on_manifold || at_saddle));
  }
}

TEST_CASE("escape Monte Carlo on the quadratic finds no saddles") {
  const ObjectiveProblem quad = make_problem("quadratic");
  EscapeOptions opts;
  opts.max_iter = 10000;
  const EscapeResult result = escape_monte_carlo(
      quad, Region::ball(Vector::Zero(2), 3.0), 0.1, 100, 2, opts);
  CHECK(result.saddle_fraction == 0.0);
  CHECK(result.n_converged == 100);
}

TEST_CASE("escape Monte Carlo is deterministic for a fixed seed") {
  const ObjectiveProblem sf = make_problem("scalar_factorization");
  EscapeOptions opts;
  opts.max_iter = 20000;
  const EscapeResult a = escape_monte_carlo(
      sf, Region::ball(Vector::Zero(2), 2.0), 0.02, 50, 5, opts);
  opts.threads = 4;
  const EscapeResult b = escape_monte_carlo(
      sf, Region::ball(Vector::Zero(2), 2.0), 0.02, 50, 5, opts);
  CHECK(a.saddle_fraction == b.saddle_fraction);
  for (int i = 0; i < 50; ++i) {
    CHECK(a.initial_points[i] == b.initial_points[i]);
    CHECK(a.reports[i].point == b.reports[i].point);
  }
}

TEST_CASE("sigma estimate: quadratic flow lengths equal the initial norm") {
  const ObjectiveProblem quad = make_problem("quadratic");
  const SigmaEstimate est =
      estimate_sigma(quad, Region::ball(Vector::Zero(2), 1.0),
                     SigmaMode::continuous, 0.0, 100.0, 300, 19);
  CHECK(!est.blowup);
  CHECK(est.max_length <= 1.0 + 1e-9);
  CHECK(est.max_length >= 0.9);
}

TEST_CASE("sigma estimate: continuous_T bound for the quadratic") {
  const ObjectiveProblem quad = make_problem("quadratic");
  SigmaOptions opts;
  opts.sup_f = 0.5;
  const SigmaEstimate est =
      estimate_sigma(quad, Region::ball(Vector::Zero(2), 1.0),
                     SigmaMode::continuous_T, 0.0, 1.0, 300, 19, opts);
  REQUIRE(est.analytic_bound.has_value());
  CHECK(*est.analytic_bound == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(est.bound_holds);
  // Flow length over [0,1] is ||x0|| (1 - e^{-1}) <= 0.6322.
  CHECK(est.max_length <= (1.0 - std::exp(-1.0)) + 1e-6);
}

TEST_CASE("sigma estimate: blow-up aborts with evidence") {
  const ObjectiveProblem quartic = make_problem("negative_quartic");
  Vector center(1);
  center << 1.0;
  SigmaOptions opts;
  opts.escape_radius = 100.0;
  const SigmaEstimate est = estimate_sigma(
      quartic, Region::ball(center, 0.5), SigmaMode::continuous, 0.0, 50.0,
      20, 3, opts);
  CHECK(est.blowup);
  CHECK(!est.note.empty());
}

TEST_CASE("sigma estimate: discrete mode with random step sequences") {
  const ObjectiveProblem quad = make_problem("quadratic");
  const SigmaEstimate est =
      estimate_sigma(quad, Region::ball(Vector::Zero(2), 1.0),
                     SigmaMode::discrete, 0.5, 0.0, 100, 23);
  CHECK(!est.blowup);
  // Iterates stay on the ray toward zero, so every run's length is ||x0||.
  CHECK(est.max_length <= 1.0 + 1e-9);

  const SigmaEstimate again =
      estimate_sigma(quad, Region::ball(Vector::Zero(2), 1.0),
                     SigmaMode::discrete, 0.5, 0.0, 100, 23);
  CHECK(est.max_length == again.max_length);

  // More samples can only increase the observed maximum (same seed).
  const SigmaEstimate more =
      estimate_sigma(quad, Region::ball(Vector::Zero(2), 1.0),
                     SigmaMode::discrete, 0.5, 0.0, 200, 23);
  CHECK(more.max_length >= est.max_length);
}

TEST_CASE("estimate_sigma validates inputs") {
  const ObjectiveProblem quad = make_problem("quadratic");
  const Region ball = Region::ball(Vector::Zero(2), 1.0);
  CHECK_THROWS_AS(
      estimate_sigma(quad, ball, SigmaMode::discrete, 0.0, 1.0, 10, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(
      estimate_sigma(quad, ball, SigmaMode::continuous_T, 0.0, 0.0, 10, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(
      estimate_sigma(quad, ball, SigmaMode::continuous, 0.0, 1.0, 0, 1),
      std::invalid_argument);
}
