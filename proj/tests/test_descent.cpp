#include <doctest.h>

#include <cmath>

#include "flowcert/descent.hpp"
#include "flowcert/problems.hpp"
#include "flowcert/rng.hpp"

using namespace flowcert;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("StepSchedule validates its bounds") {
  CHECK_THROWS_AS(StepSchedule::constant(0.0), std::invalid_argument);
  CHECK_THROWS_AS(StepSchedule::constant(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(StepSchedule::sequence({}), std::invalid_argument);
  CHECK_THROWS_AS(StepSchedule::sequence({0.1, -0.2}), std::invalid_argument);

  const StepSchedule seq = StepSchedule::sequence({0.3, 0.1, 0.2});
  CHECK(seq.alpha_upper() == 0.3);
  CHECK(seq.alpha_lower() == 0.1);
  CHECK(seq.alpha(0) == 0.3);
  CHECK(seq.alpha(2) == 0.2);
  CHECK(seq.alpha(99) == 0.2);  // repeats the last value

  const StepSchedule bad =
      StepSchedule::generator([](int) { return 2.0; }, 1.0, 0.0);
  CHECK_THROWS_AS(bad.alpha(0), std::invalid_argument);
}

TEST_CASE("quadratic descent halves the iterate at alpha = 0.5") {
  const ObjectiveProblem quad = make_problem("quadratic");
  const DiscreteTrajectory traj = run_gd(quad, vec2(1.0, 0.0),
                                         StepSchedule::constant(0.5), 200,
                                         1e-10, 1e6);
  CHECK(traj.termination == DiscreteTrajectory::Termination::grad_tol);
  // x_k = (0.5^k, 0) exactly: multiplication by 0.5 is exact in binary.
  for (int k = 0; k < traj.n_iterates(); ++k) {
    CHECK(traj.iterates[k][0] == std::ldexp(1.0, -k));
    CHECK(traj.iterates[k][1] == 0.0);
  }
  // Cumulative length of the infinite run is 1; the truncated run is within
  // the grad_tol of it.
  CHECK(traj.length() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("a critical initial point stays put") {
  const ObjectiveProblem cubic = make_problem("cubic_saddle");
  const DiscreteTrajectory traj = run_gd(cubic, vec2(0.0, 0.0),
                                         StepSchedule::constant(0.1), 100,
                                         1e-10, 1e6);
  CHECK(traj.termination == DiscreteTrajectory::Termination::grad_tol);
  CHECK(traj.n_iterates() == 1);
  CHECK(traj.length() == 0.0);
}

TEST_CASE("negative quartic escapes monotonically") {
  const ObjectiveProblem quartic = make_problem("negative_quartic");
  Vector x0(1);
  x0 << 1.0;
  const DiscreteTrajectory traj =
      run_gd(quartic, x0, StepSchedule::constant(0.1), 100000, 1e-10, 10.0);
  CHECK(traj.termination == DiscreteTrajectory::Termination::escaped);
  // Oracle: direct simulation of x <- x + 0.1 x^3.
  double x = 1.0;
  for (int k = 0; k < traj.n_iterates(); ++k) {
    CHECK(traj.iterates[k][0] == doctest::Approx(x).epsilon(1e-15));
    if (k + 1 < traj.n_iterates()) {
      CHECK(traj.iterates[k + 1][0] > traj.iterates[k][0]);
    }
    x = x + 0.1 * x * x * x;
  }
}

TEST_CASE("exact-update property: replaying the rule reproduces iterates") {
  const ObjectiveProblem sf = make_problem("scalar_factorization");
  const DiscreteTrajectory traj = run_gd(sf, vec2(1.7, -0.3),
                                         StepSchedule::constant(0.02), 5000,
                                         1e-9, 1e6);
  REQUIRE(traj.n_iterates() > 2);
  for (int k = 0; k + 1 < traj.n_iterates(); ++k) {
    const Vector replay =
        traj.iterates[k] - traj.steps[k] * eval_gradient(sf, traj.iterates[k]);
    CHECK(replay == traj.iterates[k + 1]);
  }
}

TEST_CASE("quadratic cumulative length converges to the initial norm") {
  const ObjectiveProblem quad = make_problem("quadratic");
  for (double alpha : {0.2, 0.5, 0.9}) {
    CAPTURE(alpha);
    const Vector x0 = vec2(0.6, -0.8);  // norm 1
    const DiscreteTrajectory traj =
        run_gd(quad, x0, StepSchedule::constant(alpha), 200, 0.0, 1e6);
    CHECK(traj.length() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("running-min gradient norm is nonincreasing") {
  const ObjectiveProblem sf = make_problem("scalar_factorization");
  const DiscreteTrajectory traj = run_gd(sf, vec2(0.3, 1.9),
                                         StepSchedule::constant(0.03), 20000,
                                         1e-9, 1e6);
  double running = std::numeric_limits<double>::infinity();
  for (double g : traj.grad_norms) {
    const double next = std::min(running, g);
    CHECK(next <= running);
    running = next;
  }
}

TEST_CASE("rate certificate on the quadratic run") {
  const ObjectiveProblem quad = make_problem("quadratic");
  const DiscreteTrajectory traj = run_gd(quad, vec2(1.0, 0.0),
                                         StepSchedule::constant(0.5), 200,
                                         1e-10, 1e6);
  const CertificateReport cert = rate_certificate(traj, 0.5);
  CHECK(cert.pass);
  CHECK(!cert.invalidated);

  // Spot check k = 4 by hand: min grad = 0.5^4, truncated tail from i = 2 is
  // sum of 0.5^{i+1} = 0.25 - 0.5^K, RHS = 4/6 * tail.
  const int K = traj.n_iterates() - 1;
  double tail = 0.0;
  for (int i = 2; i < K; ++i) tail += std::ldexp(1.0, -(i + 1));
  const double rhs = (2.0 / 0.5) / 6.0 * tail;
  CHECK(rhs == doctest::Approx(4.0 * 0.25 / 6.0).epsilon(1e-8));
  CHECK(std::ldexp(1.0, -4) <= rhs);
}

TEST_CASE("rate certificate trivially passes at a critical point") {
  const ObjectiveProblem cubic = make_problem("cubic_saddle");
  const DiscreteTrajectory traj = run_gd(cubic, vec2(0.0, 0.0),
                                         StepSchedule::constant(0.1), 100,
                                         1e-10, 1e6);
  const CertificateReport cert = rate_certificate(traj, 0.1);
  CHECK(cert.pass);
  CHECK(cert.margin == doctest::Approx(0.0));
}

TEST_CASE("rate certificate on a cubic run") {
  const ObjectiveProblem cubic = make_problem("cubic_saddle");
  const DiscreteTrajectory traj = run_gd(cubic, vec2(0.5, -0.5),
                                         StepSchedule::constant(0.01), 1000000,
                                         1e-8, 1e6);
  REQUIRE(traj.termination == DiscreteTrajectory::Termination::grad_tol);
  CHECK(rate_certificate(traj, 0.01).pass);
}

TEST_CASE("rate certificate input validation") {
  const ObjectiveProblem quad = make_problem("quadratic");
  const DiscreteTrajectory traj = run_gd(quad, vec2(1.0, 0.0),
                                         StepSchedule::constant(0.5), 3,
                                         1e-10, 1e6);
  CHECK(traj.termination == DiscreteTrajectory::Termination::max_iter);
  CHECK_THROWS_AS(rate_certificate(traj, 0.0), std::invalid_argument);
  CHECK(rate_certificate(traj, 0.5).invalidated);
}

TEST_CASE("run_gd validates preconditions") {
  const ObjectiveProblem quad = make_problem("quadratic");
  CHECK_THROWS_AS(run_gd(quad, vec2(1, 0), StepSchedule::constant(0.1), 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_gd(quad, vec2(1, 0), StepSchedule::constant(0.1), 10,
                         -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_gd(quad, vec2(1, 0), StepSchedule::constant(0.1), 10,
                         1e-10, 0.5),
                  std::invalid_argument);
}

TEST_CASE("nonfinite values terminate the run with a report") {
  const ObjectiveProblem quartic = make_problem("negative_quartic");
  Vector x0(1);
  x0 << 1.0;
  // Large escape radius: the iterate eventually overflows x^4.
  const DiscreteTrajectory traj = run_gd(quartic, x0,
                                         StepSchedule::constant(0.5), 100000,
                                         1e-10, 1e100);
  CHECK(traj.termination == DiscreteTrajectory::Termination::nonfinite);
  CHECK(traj.n_iterates() >= 1);
  CHECK(traj.steps.size() == static_cast<std::size_t>(traj.n_iterates()) - 1);
}
