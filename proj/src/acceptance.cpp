#include "flowcert/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>

#include "flowcert/kl.hpp"
#include "flowcert/lipschitz.hpp"
#include "flowcert/parallel.hpp"
#include "flowcert/problems.hpp"
#include "flowcert/rng.hpp"
#include "flowcert/saddle.hpp"
#include "flowcert/tracking.hpp"

namespace flowcert {

namespace {

constexpr std::uint64_t kSeed = 2024;

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << "FAILED: " << what;
    }
  }

  void note(const std::string& what) {
    if (detail.tellp() > 0) detail << "; ";
    detail << what;
  }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// --- criterion 1: Example 4.1 KL certificate on a grid ---------------------

void criterion_kl_grid(Check& check, int) {
  const ObjectiveProblem cubic = make_problem("cubic_saddle");
  const Desingularizer psi(3.0, 1.0 / 3.0);
  std::vector<Vector> samples;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Vector x(2);
      x[0] = -0.8 + 1.6 * i / (n - 1);
      x[1] = -0.8 + 1.6 * j / (n - 1);
      if (x.norm() > 0.8) continue;
      if (std::abs(x[0]) <= 1e-6) continue;
      if (std::abs(x[0] - x[1]) <= 1e-6) continue;
      samples.push_back(x);
    }
  }
  const CertificateReport cert = kl_check(cubic, psi, {0.0}, samples);
  check.require(!cert.invalidated && cert.margin >= -1e-9,
                "kl margin " + fmt(cert.margin) + " < -1e-9");
  check.note("margin = " + fmt(cert.margin) + " over " +
             std::to_string(samples.size()) + " grid points");
}

// --- criterion 2: Example 4.1 uniform decrease ------------------------------

void criterion_uniform_decrease(Check& check, int threads) {
  const ObjectiveProblem cubic = make_problem("cubic_saddle");
  const DecreaseResult result = uniform_decrease_experiment(
      cubic, 5e-5, 500, kSeed, 0.3, 0.8, 30'000'000, threads);
  check.require(result.n_exited == 500,
                std::to_string(result.n_not_exited) + " runs never exited");
  check.require(!result.certificate.invalidated && result.certificate.pass,
                "a run decreased less than 2 psi^{-1}(1/9) = " +
                    fmt(result.threshold));
  check.note("min decrease margin = " + fmt(result.certificate.margin) +
             ", threshold = " + fmt(result.threshold));
}

// --- criterion 3: blow-up reproduction --------------------------------------

void criterion_blowup(Check& check, int) {
  const ObjectiveProblem quartic = make_problem("negative_quartic");
  Vector x0(1);
  x0[0] = 1.0;
  // Escape at radius 1e3: the exact solution crosses it at t = 0.5 - 5e-7,
  // well clear of the integrator's accumulated time lag.
  const FlowTrajectory flow = integrate_flow(quartic, x0, 1.0, 1e-8, 1e3);
  check.require(flow.termination == FlowTrajectory::Termination::blowup,
                std::string("termination was ") + to_string(flow.termination));
  check.require(flow.t_end() < 0.5,
                "no blow-up before t = 0.5 (t_end = " + fmt(flow.t_end()) + ")");
  double worst = 0.0;
  for (int i = 0; i <= 450; ++i) {
    const double t = 0.001 * i;
    const double exact = 1.0 / std::sqrt(1.0 - 2.0 * t);
    const double got = flow.state_at(t)[0];
    worst = std::max(worst, std::abs(got - exact) / exact);
  }
  check.require(worst <= 1e-4, "relative deviation " + fmt(worst) +
                                   " from (1-2t)^{-1/2} exceeds 1e-4");
  check.note("max rel deviation = " + fmt(worst) + " for t <= 0.45, t_end = " +
             fmt(flow.t_end()));
}

// --- criterion 4: tracking ---------------------------------------------------

void criterion_tracking(Check& check, int threads) {
  struct Setup {
    ObjectiveProblem problem;
    Region region;
    LipschitzEstimate lip;
    double x0_radius;
    double eps_lo, eps_hi;
    double t_lo, t_hi;
  };
  std::vector<Setup> setups;
  {
    const ObjectiveProblem quad = make_problem("quadratic");
    Setup s{quad, quad.known_lipschitz->region, {}, 1.0, 0.05, 0.3, 0.5, 2.0};
    s.lip.L = quad.known_lipschitz->L;
    s.lip.M = quad.known_lipschitz->M;
    s.lip.region = s.region;
    setups.push_back(std::move(s));
  }
  {
    const ObjectiveProblem cubic = make_problem("cubic_saddle");
    const Region region = Region::ball(Vector::Zero(2), 0.8);
    Setup s{cubic, region, estimate_constants(cubic, region, 4000, kSeed),
            0.2, 0.05, 0.15, 0.3, 0.6};
    setups.push_back(std::move(s));
  }

  int failures = 0, invalidated = 0;
  double worst_ratio = 0.0;  // max over configs of max_dev / allowance
  std::mutex mu;
  for (const Setup& setup : setups) {
    parallel_for(20, threads, [&](int i) {
      Rng rng = Rng::child(kSeed, 0xC4 + i);
      const Vector x0 = rng.in_ball(Vector::Zero(setup.problem.dim),
                                    setup.x0_radius);
      TrackingSetup ts;
      ts.epsilon = rng.uniform(setup.eps_lo, setup.eps_hi);
      ts.horizon = rng.uniform(setup.t_lo, setup.t_hi);
      ts.lipschitz = setup.lip;
      const double flow_tol = 1e-8;
      const double alpha =
          alpha_bar(ts.epsilon, ts.horizon, ts.lipschitz.L, ts.lipschitz.M);
      const TrackingReport report = tracking_deviation(
          setup.problem, x0, StepSchedule::constant(alpha), ts, flow_tol);
      std::lock_guard<std::mutex> lock(mu);
      if (report.invalidated) {
        ++invalidated;
      } else if (!report.pass) {
        ++failures;
      } else {
        worst_ratio = std::max(worst_ratio,
                               report.max_deviation /
                                   (ts.epsilon + 10.0 * flow_tol));
      }
    });
  }
  check.require(invalidated == 0,
                std::to_string(invalidated) + " configs invalidated");
  check.require(failures == 0, std::to_string(failures) +
                                   " configs exceeded epsilon + 10 tol");
  check.note("40 configs, worst deviation/allowance = " + fmt(worst_ratio));
}

// --- criterion 5: length certificates ---------------------------------------

struct LengthBattery {
  std::string id;
  ObjectiveProblem problem;
  Desingularizer psi;
  int m;
  Region region;
  double x0_radius;
  double flow_horizon;
  double alpha;
  double grad_tol;
  long long max_iter;
};

std::vector<LengthBattery> length_batteries() {
  std::vector<LengthBattery> out;
  out.push_back({"quadratic", make_problem("quadratic"),
                 Desingularizer(2.0, 0.5), 1,
                 Region::ball(Vector::Zero(2), 2.0), 1.8, 60.0, 0.2, 1e-10,
                 200'000});
  out.push_back({"cubic_saddle", make_problem("cubic_saddle"),
                 Desingularizer(3.0, 1.0 / 3.0), 1,
                 Region::ball(Vector::Zero(2), 0.8), 0.25, 0.5, 0.01, 1e-9,
                 1'000'000});
  out.push_back({"negative_quartic", make_problem("negative_quartic"),
                 Desingularizer(1.5, 0.25), 1,
                 Region::ball(Vector::Zero(1), 1.0), 0.5, 1.0, 0.05, 1e-10,
                 1'000'000});
  out.push_back({"scalar_factorization", make_problem("scalar_factorization"),
                 Desingularizer(1.6, 0.5), 2,
                 Region::ball(Vector::Zero(2), 3.3), 2.0, 20.0, 0.005, 1e-9,
                 1'000'000});
  ProblemParams mf;
  out.push_back({"matrix_factorization", make_problem("matrix_factorization", mf),
                 Desingularizer(4.0, 0.5), 3,
                 Region::ball(Vector::Zero(4), 3.0), 1.2, 20.0, 0.005, 1e-9,
                 1'000'000});
  return out;
}

void criterion_length_certificates(Check& check, int threads) {
  for (const LengthBattery& battery : length_batteries()) {
    const LipschitzEstimate lip =
        battery.problem.known_lipschitz
            ? LipschitzEstimate{battery.problem.known_lipschitz->L,
                                battery.problem.known_lipschitz->M,
                                battery.region, 0, 1.0}
            : estimate_constants(battery.problem, battery.region, 4000, kSeed);
    const double eps = 1.0;
    const double alpha_cap =
        std::min(1.0 / lip.L, 2.0 * eps / ((6.0 + eps) * lip.M));
    const double alpha = std::min(battery.alpha, 0.9 * alpha_cap);
    const double escape = battery.region.radius();

    std::vector<std::string> problems(50);
    double worst_cont = std::numeric_limits<double>::infinity();
    double worst_disc = std::numeric_limits<double>::infinity();
    std::mutex mu;
    parallel_for(50, threads, [&](int i) {
      Rng rng = Rng::child(kSeed, 0x15C + i);
      const Vector x0 = rng.in_ball(Vector::Zero(battery.problem.dim),
                                    battery.x0_radius);
      const FlowTrajectory flow =
          integrate_flow(battery.problem, x0, battery.flow_horizon, 1e-8,
                         10.0 * battery.region.radius());
      const CertificateReport cont = continuous_length_certificate(
          flow, battery.problem, battery.psi, battery.m, std::nullopt,
          battery.region);
      const DiscreteTrajectory traj =
          run_gd(battery.problem, x0, StepSchedule::constant(alpha),
                 battery.max_iter, battery.grad_tol, escape);
      const CertificateReport disc = discrete_length_certificate(
          traj, battery.problem, battery.psi, battery.m, eps, lip.L, lip.M,
          battery.region);
      std::lock_guard<std::mutex> lock(mu);
      if (cont.invalidated || !cont.pass) {
        problems[i] = battery.id + "[" + std::to_string(i) +
                      "] continuous: " + cont.note;
      } else if (disc.invalidated || !disc.pass) {
        problems[i] = battery.id + "[" + std::to_string(i) +
                      "] discrete: " + disc.note;
      }
      if (!cont.invalidated) worst_cont = std::min(worst_cont, cont.margin);
      if (!disc.invalidated) worst_disc = std::min(worst_disc, disc.margin);
    });
    for (const std::string& p : problems) {
      if (!p.empty()) {
        check.require(false, p);
        break;
      }
    }
    check.note(battery.id + ": min margins cont " + fmt(worst_cont) +
               ", disc " + fmt(worst_disc));
  }
}

// --- criterion 6: balance invariant ------------------------------------------

void criterion_balance(Check& check, int) {
  const double rel_tol = 1e-8;
  const double horizon = 20.0;
  const double budget = 100.0 * rel_tol * (1.0 + horizon);

  struct Case {
    std::string name;
    FactorizationInstance inst;
    Vector x0;
  };
  std::vector<Case> cases;
  {
    Matrix target(1, 1);
    target << 1.0;
    FactorizationInstance inst(target, 1);
    Matrix X(1, 1), Y(1, 1);
    X << 2.0;
    Y << 1.0;
    cases.push_back({"scalar(2,1)", inst, inst.pack(X, Y)});
  }
  {
    FactorizationInstance inst(default_factorization_target(), 1);
    Rng rng = Rng::child(kSeed, 0xBA1);
    cases.push_back({"2x2 seeded", inst, rng.in_ball(Vector::Zero(4), 1.5)});
  }

  for (const Case& c : cases) {
    ProblemParams params;
    params.target = c.inst.target();
    params.rank = c.inst.rank();
    const ObjectiveProblem problem =
        make_problem("matrix_factorization", params);
    const FlowTrajectory flow = integrate_flow(problem, c.x0, horizon, rel_tol);
    double worst = 0.0;
    for (const Vector& state : flow.states) {
      worst = std::max(worst, balance_residual(c.inst, state, c.x0));
    }
    check.require(worst <= budget, c.name + ": balance residual " +
                                       fmt(worst) + " > " + fmt(budget));
    check.note(c.name + ": max residual = " + fmt(worst));
  }
}

// --- criterion 7: boundedness bound ------------------------------------------

void criterion_factorization_bound(Check& check, int threads) {
  // The scalar (2, 1, target 1) instance is tight at t = 0: bound 17 vs 17.
  {
    Matrix target(1, 1);
    target << 1.0;
    FactorizationInstance inst(target, 1);
    Matrix X(1, 1), Y(1, 1);
    X << 2.0;
    Y << 1.0;
    ProblemParams params;
    params.target = target;
    params.rank = 1;
    const ObjectiveProblem problem =
        make_problem("matrix_factorization", params);
    const FlowTrajectory flow =
        integrate_flow(problem, inst.pack(X, Y), 10.0, 1e-8);
    const double balance0 = 3.0;
    const double bound = balance0 * balance0 + 2.0 * std::pow(1.0 + 1.0, 2);
    const Vector& s0 = flow.states.front();
    const double lhs0 = std::pow(s0[0], 4) + std::pow(s0[1], 4);
    check.require(std::abs(bound - 17.0) <= 1e-12, "scalar bound is not 17");
    check.require(std::abs(bound - lhs0) <= 1e-9,
                  "scalar margin at t = 0 is " + fmt(bound - lhs0) +
                      ", expected 0");
    const CertificateReport cert = factorization_bound_check(flow, inst, 1e-6);
    check.require(cert.pass, "scalar bound certificate failed: margin " +
                                 fmt(cert.margin));
    check.note("scalar margin at t=0 = " + fmt(bound - lhs0));
  }

  std::vector<std::string> failures(20);
  double worst = std::numeric_limits<double>::infinity();
  std::mutex mu;
  parallel_for(20, threads, [&](int i) {
    Rng rng = Rng::child(kSeed, 0xB0 + i);
    const int rank = 1 + (i % 2);
    Matrix target(2, 2);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) target(r, c) = rng.uniform(-1.5, 1.5);
    }
    FactorizationInstance inst(target, rank);
    ProblemParams params;
    params.target = target;
    params.rank = rank;
    const ObjectiveProblem problem =
        make_problem("matrix_factorization", params);
    const Vector x0 = rng.in_ball(Vector::Zero(inst.dim()), 1.5);
    const FlowTrajectory flow = integrate_flow(problem, x0, 10.0, 1e-8);
    const CertificateReport cert = factorization_bound_check(flow, inst, 1e-6);
    std::lock_guard<std::mutex> lock(mu);
    worst = std::min(worst, cert.margin);
    if (!cert.pass) {
      failures[i] = "instance " + std::to_string(i) + ": margin " +
                    fmt(cert.margin);
    }
  });
  for (const std::string& f : failures) {
    if (!f.empty()) {
      check.require(false, f);
      break;
    }
  }
  check.note("20 seeded instances, min margin = " + fmt(worst));
}

// --- criterion 8: rate inequality --------------------------------------------

void criterion_rate(Check& check, int) {
  struct Run {
    std::string name;
    ObjectiveProblem problem;
    Vector x0;
    double alpha;
    double grad_tol;
  };
  std::vector<Run> runs;
  {
    Vector x0(2);
    x0 << 1.0, 0.0;
    runs.push_back({"quadratic a=0.5", make_problem("quadratic"), x0, 0.5, 1e-10});
    Vector x1(2);
    x1 << -0.7, 1.3;
    runs.push_back({"quadratic a=0.3", make_problem("quadratic"), x1, 0.3, 1e-10});
  }
  {
    Vector x0(2);
    x0 << 0.5, -0.5;
    runs.push_back({"cubic", make_problem("cubic_saddle"), x0, 0.01, 1e-8});
  }
  {
    Vector x0(2);
    x0 << 2.0, 1.0;
    runs.push_back({"scalar_factorization (2,1)",
                    make_problem("scalar_factorization"), x0, 0.01, 1e-9});
    Vector x1(2);
    x1 << 0.5, 0.8;
    runs.push_back({"scalar_factorization (0.5,0.8)",
                    make_problem("scalar_factorization"), x1, 0.02, 1e-9});
  }
  {
    const ObjectiveProblem mf = make_problem("matrix_factorization");
    Rng rng = Rng::child(kSeed, 0x8A7E);
    runs.push_back({"matrix_factorization", mf,
                    rng.in_ball(Vector::Zero(4), 1.2), 0.005, 1e-9});
  }
  {
    Vector x0(1);
    x0 << 0.0;
    runs.push_back({"negative_quartic at 0", make_problem("negative_quartic"),
                    x0, 0.1, 1e-10});
  }

  double worst = std::numeric_limits<double>::infinity();
  for (const Run& run : runs) {
    const DiscreteTrajectory traj =
        run_gd(run.problem, run.x0, StepSchedule::constant(run.alpha),
               2'000'000, run.grad_tol, 1e6);
    if (traj.termination != DiscreteTrajectory::Termination::grad_tol) {
      check.require(false, run.name + " did not terminate at grad_tol");
      continue;
    }
    const CertificateReport cert = rate_certificate(traj, run.alpha);
    check.require(!cert.invalidated && cert.margin >= -1e-12,
                  run.name + ": rate margin " + fmt(cert.margin));
    worst = std::min(worst, cert.margin);
  }
  check.note(std::to_string(runs.size()) + " runs, min margin = " + fmt(worst));
}

// --- criterion 9: saddle escape ----------------------------------------------

void criterion_saddle_escape(Check& check, int threads) {
  const ObjectiveProblem problem = make_problem("scalar_factorization");
  EscapeOptions opts;
  opts.grad_tol = 1e-8;
  opts.max_iter = 100'000;
  opts.threads = threads;
  const EscapeResult result = escape_monte_carlo(
      problem, Region::ball(Vector::Zero(2), 2.0), 0.01, 1000, kSeed, opts);
  check.require(result.n_unbounded == 0,
                std::to_string(result.n_unbounded) + " unbounded trials");
  check.require(result.saddle_fraction <= 0.01,
                "saddle fraction " + fmt(result.saddle_fraction) + " > 1%");
  check.note("fraction = " + fmt(result.saddle_fraction) + " (" +
             std::to_string(result.n_saddle_limits) + "/1000), " +
             std::to_string(result.n_nonconverged) + " non-converged");
}

// --- criterion 10: energy identity -------------------------------------------

void criterion_energy(Check& check, int) {
  struct Case {
    std::string name;
    ObjectiveProblem problem;
    Vector x0;
    double horizon;
  };
  std::vector<Case> cases;
  {
    Vector x0(2);
    x0 << 1.0, 0.0;
    cases.push_back({"quadratic T=5", make_problem("quadratic"), x0, 5.0});
  }
  {
    ProblemParams p;
    p.dim = 4;
    Rng rng = Rng::child(kSeed, 0xE4);
    cases.push_back({"quadratic dim4", make_problem("quadratic", p),
                     rng.in_ball(Vector::Zero(4), 1.5), 10.0});
  }
  {
    Vector x0(2);
    x0 << 0.5, -0.5;
    cases.push_back({"cubic (0.5,-0.5)", make_problem("cubic_saddle"), x0, 10.0});
    Vector x1(2);
    x1 << 0.2, 0.1;
    cases.push_back({"cubic (0.2,0.1)", make_problem("cubic_saddle"), x1, 5.0});
  }
  {
    Vector x0(1);
    x0 << 0.9;
    cases.push_back({"quartic x0=0.9 T=0.3", make_problem("negative_quartic"),
                     x0, 0.3});
    Vector x1(1);
    x1 << 0.5;
    cases.push_back({"quartic x0=0.5 T=1.5", make_problem("negative_quartic"),
                     x1, 1.5});
  }
  {
    Vector x0(2);
    x0 << 2.0, 1.0;
    cases.push_back({"scalar_factorization T=20",
                     make_problem("scalar_factorization"), x0, 20.0});
  }
  {
    Rng rng = Rng::child(kSeed, 42);
    cases.push_back({"matrix_factorization seed42 T=10",
                     make_problem("matrix_factorization"),
                     rng.in_ball(Vector::Zero(4), 1.5), 10.0});
  }

  double worst = 0.0;
  for (const Case& c : cases) {
    const FlowTrajectory flow = integrate_flow(c.problem, c.x0, c.horizon, 1e-8);
    const double residual = energy_identity_residual(flow, c.problem);
    worst = std::max(worst, residual);
    check.require(residual <= 1e-5,
                  c.name + ": energy residual " + fmt(residual) + " > 1e-5");
  }
  check.note(std::to_string(cases.size()) + " flows, max residual = " +
             fmt(worst));
}

// --- criterion 11: sigma_T bound ---------------------------------------------

void criterion_sigma_bound(Check& check, int threads) {
  const ObjectiveProblem problem = make_problem("quadratic");
  SigmaOptions opts;
  opts.sup_f = 0.5;
  opts.threads = threads;
  const SigmaEstimate est =
      estimate_sigma(problem, Region::ball(Vector::Zero(2), 1.0),
                     SigmaMode::continuous_T, 0.0, 1.0, 400, kSeed, opts);
  check.require(!est.blowup, "unexpected blow-up");
  check.require(est.analytic_bound.has_value(), "analytic bound missing");
  if (est.analytic_bound) {
    check.require(std::abs(*est.analytic_bound - std::sqrt(0.5)) <= 1e-12,
                  "bound is not sqrt(0.5)");
    check.require(est.max_length <= *est.analytic_bound + 1e-6,
                  "observed length " + fmt(est.max_length) +
                      " exceeds bound " + fmt(*est.analytic_bound));
    check.note("max length = " + fmt(est.max_length) + " <= bound " +
               fmt(*est.analytic_bound));
  }
}

// --- criterion 12: oracle suite ----------------------------------------------

void criterion_oracles(Check& check, int) {
  for (const std::string& id : catalog_ids()) {
    const ObjectiveProblem problem = make_problem(id);
    Rng rng = Rng::child(kSeed, std::hash<std::string>{}(id));
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Vector x = rng.in_ball(Vector::Zero(problem.dim), 2.0);
      const Vector g = eval_gradient(problem, x);
      const Vector fd = finite_diff_gradient(problem, x, 1e-6);
      const double err = (g - fd).norm() / (1.0 + g.norm());
      worst = std::max(worst, err);
    }
    check.require(worst <= 1e-5,
                  id + ": gradient/finite-difference gap " + fmt(worst));
  }
  check.note("5 problems x 100 seeded points");
}

}  // namespace

std::vector<CriterionResult> run_acceptance_suite(int threads) {
  using Clock = std::chrono::steady_clock;
  struct Entry {
    const char* name;
    std::function<void(Check&, int)> fn;
    double budget_seconds;
  };
  const std::vector<Entry> entries = {
      {"example 4.1 KL certificate (200x200 grid)", criterion_kl_grid, 5},
      {"example 4.1 uniform decrease (500 inits)", criterion_uniform_decrease,
       60},
      {"negative quartic blow-up reproduction", criterion_blowup, 1},
      {"tracking (20 seeded configs x 2 problems)", criterion_tracking, 30},
      {"length certificates (50 trajectories per problem)",
       criterion_length_certificates, 120},
      {"balance invariant (horizon 20, rel_tol 1e-8)", criterion_balance, 10},
      {"factorization boundedness bound (20 instances)",
       criterion_factorization_bound, 30},
      {"rate inequality on grad_tol-terminated runs", criterion_rate, 30},
      {"saddle escape Monte Carlo (1000 trials)", criterion_saddle_escape, 60},
      {"energy identity on catalog flows", criterion_energy, 10},
      {"sigma_T bound for the quadratic", criterion_sigma_bound, 10},
      {"gradient oracle suite", criterion_oracles, 300},
  };

  std::vector<CriterionResult> results;
  const auto suite_start = Clock::now();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    Check check;
    const auto start = Clock::now();
    try {
      entries[i].fn(check, threads);
    } catch (const std::exception& e) {
      check.require(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(Clock::now() - start).count();
    check.require(seconds <= entries[i].budget_seconds,
                  "runtime " + fmt(seconds) + " s exceeds the " +
                      fmt(entries[i].budget_seconds) + " s budget");
    CriterionResult r;
    r.index = static_cast<int>(i) + 1;
    r.name = entries[i].name;
    r.pass = check.pass;
    r.detail = check.detail.str();
    r.seconds = seconds;
    results.push_back(std::move(r));
  }
  // The whole battery doubles as the `verify` contract: under five minutes.
  const double total =
      std::chrono::duration<double>(Clock::now() - suite_start).count();
  if (total > 300.0) {
    CriterionResult r;
    r.index = static_cast<int>(entries.size()) + 1;
    r.name = "wall-time budget";
    r.pass = false;
    r.detail = "suite took " + fmt(total) + " s (> 300 s)";
    results.push_back(std::move(r));
  }
  return results;
}

int report_acceptance(const std::vector<CriterionResult>& results) {
  int failed = 0;
  for (const auto& r : results) {
    std::printf("[%s] criterion %2d: %s (%s) [%.1fs]\n",
                r.pass ? "PASS" : "FAIL", r.index, r.name.c_str(),
                r.detail.c_str(), r.seconds);
    if (!r.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failed,
              results.size());
  return failed;
}

}  // namespace flowcert
