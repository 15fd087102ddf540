#include "flowcert/runner.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "flowcert/kl.hpp"
#include "flowcert/lipschitz.hpp"
#include "flowcert/parallel.hpp"
#include "flowcert/rng.hpp"
#include "flowcert/saddle.hpp"
#include "flowcert/tracking.hpp"

#ifndef FLOWCERT_GIT_DESCRIBE
#define FLOWCERT_GIT_DESCRIBE "unknown"
#endif

namespace flowcert {

namespace {

using json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open '" + path + "' for writing");
    out_ << header << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ",";
      out_ << cells[i];
    }
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

std::vector<std::string> coords(const Vector& x) {
  std::vector<std::string> cells;
  cells.reserve(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) cells.push_back(fmt(x[i]));
  return cells;
}

std::string coord_header(int dim) {
  std::string h;
  for (int i = 0; i < dim; ++i) h += ",x" + std::to_string(i);
  return h;
}

json certificate_json(const CertificateReport& c) {
  json j;
  j["name"] = c.name;
  j["pass"] = c.pass;
  j["invalidated"] = c.invalidated;
  j["margin"] = c.margin;
  j["tolerance"] = c.tolerance;
  j["worst"] = c.worst;
  j["note"] = c.note;
  return j;
}

struct Context {
  const ExperimentConfig& config;
  const RunOptions& options;
  std::uint64_t seed = 0;
  ObjectiveProblem problem;
  RunOutcome outcome;
  json extra;  // kind-specific report payload

  std::string path(const std::string& suffix) const {
    return (std::filesystem::path(options.out_dir) /
            (config.out_prefix + "_" + suffix))
        .string();
  }

  void add(CertificateReport cert) {
    cert.tolerance *= options.tolerance_scale;
    cert.pass = !cert.invalidated && cert.margin >= -cert.tolerance;
    outcome.certificates.push_back(std::move(cert));
  }

  LipschitzEstimate lipschitz(const Region& region) const {
    if (config.lipschitz_L && config.lipschitz_M) {
      LipschitzEstimate est;
      est.L = *config.lipschitz_L;
      est.M = *config.lipschitz_M;
      est.region = region;
      est.n_samples = 0;
      est.inflation = 1.0;
      return est;
    }
    return estimate_constants(problem, region, config.lipschitz_samples,
                              Rng::child(seed, 0x11F).next_u64());
  }

  std::vector<double> critical_values_or_default() const {
    if (config.critical_values) return *config.critical_values;
    if (!problem.critical_values.empty()) return problem.critical_values;
    return {0.0};  // the paper's fallback V := {0}
  }
};

void write_discrete_csv(Context& ctx, const DiscreteTrajectory& traj,
                        const std::string& name) {
  const std::string path = ctx.path(name);
  CsvWriter csv(path, "k,t,alpha,f,grad_norm,cum_length" +
                          coord_header(ctx.problem.dim));
  double t = 0.0;
  for (int k = 0; k < traj.n_iterates(); ++k) {
    std::vector<std::string> cells = {
        std::to_string(k), fmt(t),
        fmt(k < static_cast<int>(traj.steps.size()) ? traj.steps[k] : 0.0),
        fmt(traj.f_values[k]), fmt(traj.grad_norms[k]),
        fmt(traj.cum_length[k])};
    const auto xs = coords(traj.iterates[k]);
    cells.insert(cells.end(), xs.begin(), xs.end());
    csv.row(cells);
    if (k < static_cast<int>(traj.steps.size())) t += traj.steps[k];
  }
  ctx.outcome.files_written.push_back(path);
}

void write_flow_csv(Context& ctx, const FlowTrajectory& flow,
                    const std::string& name) {
  const std::string path = ctx.path(name);
  CsvWriter csv(path, "i,t,f,grad_norm,cum_arc_length" +
                          coord_header(ctx.problem.dim));
  for (int i = 0; i < flow.n_nodes(); ++i) {
    std::vector<std::string> cells = {
        std::to_string(i), fmt(flow.times[i]), fmt(flow.f_values[i]),
        fmt(flow.derivs[i].norm()), fmt(flow.cum_arc_length[i])};
    const auto xs = coords(flow.states[i]);
    cells.insert(cells.end(), xs.begin(), xs.end());
    csv.row(cells);
  }
  ctx.outcome.files_written.push_back(path);
}

StepSchedule schedule_from_config(const ExperimentConfig& config) {
  if (!config.alphas.empty()) return StepSchedule::sequence(config.alphas);
  return StepSchedule::constant(config.alpha);
}

void run_gd_experiment(Context& ctx) {
  const StepSchedule schedule = schedule_from_config(ctx.config);
  const DiscreteTrajectory traj =
      run_gd(ctx.problem, *ctx.config.x0, schedule, ctx.config.max_iter,
             ctx.config.grad_tol, ctx.config.escape_radius);
  write_discrete_csv(ctx, traj, "trajectory.csv");
  ctx.extra["termination"] = to_string(traj.termination);
  ctx.extra["iterates"] = traj.n_iterates();
  ctx.extra["length"] = traj.length();
  ctx.extra["final_f"] = traj.f_values.back();
  ctx.extra["final_grad_norm"] = traj.grad_norms.back();
  if (schedule.alpha_lower() > 0.0 &&
      traj.termination == DiscreteTrajectory::Termination::grad_tol) {
    ctx.add(rate_certificate(traj, schedule.alpha_lower()));
  }
}

void run_flow_experiment(Context& ctx) {
  const FlowTrajectory flow =
      integrate_flow(ctx.problem, *ctx.config.x0, ctx.config.horizon,
                     ctx.config.rel_tol, ctx.config.escape_radius);
  write_flow_csv(ctx, flow, "trajectory.csv");
  ctx.extra["termination"] = to_string(flow.termination);
  ctx.extra["t_end"] = flow.t_end();
  ctx.extra["arc_length"] = flow.arc_length;
  ctx.extra["energy_integral"] = flow.energy_integral;

  const double residual = energy_identity_residual(flow, ctx.problem);
  ctx.add(make_certificate("energy_identity", 1e-5 - residual, 0.0,
                           "residual = " + fmt(residual)));
  // Cauchy-Schwarz: arc length over [0, t_end] <= sqrt(t_end * f-drop).
  const double drop =
      std::max(flow.f_values.front() - flow.f_values.back(), 0.0);
  const double bound = std::sqrt(flow.t_end() * drop);
  ctx.add(make_certificate("cauchy_schwarz_length",
                           bound - flow.arc_length,
                           100.0 * flow.rel_tol * (1.0 + bound),
                           "bound = " + fmt(bound)));
}

void run_tracking_experiment(Context& ctx) {
  TrackingSetup setup;
  setup.epsilon = ctx.config.epsilon;
  setup.horizon = ctx.config.horizon;
  setup.lipschitz = ctx.lipschitz(*ctx.config.region);

  const double threshold = alpha_bar(setup.epsilon, setup.horizon,
                                     setup.lipschitz.L, setup.lipschitz.M);
  const double alpha = ctx.config.auto_alpha ? threshold : ctx.config.alpha;
  const StepSchedule schedule = StepSchedule::constant(alpha);
  const TrackingReport report = tracking_deviation(
      ctx.problem, *ctx.config.x0, schedule, setup, ctx.config.rel_tol);

  const std::string path = ctx.path("deviations.csv");
  CsvWriter csv(path, "k,t,deviation");
  for (std::size_t k = 0; k < report.times.size(); ++k) {
    csv.row({std::to_string(k), fmt(report.times[k]),
             fmt(report.deviations[k])});
  }
  ctx.outcome.files_written.push_back(path);

  ctx.extra["alpha"] = alpha;
  ctx.extra["alpha_bar"] = report.alpha_bar_value;
  ctx.extra["L"] = setup.lipschitz.L;
  ctx.extra["M"] = setup.lipschitz.M;
  ctx.extra["variant"] = report.variant;
  ctx.extra["max_deviation"] = report.max_deviation;

  CertificateReport cert;
  if (report.invalidated) {
    cert = invalidated_certificate("tracking_deviation", report.note);
  } else {
    cert = make_certificate(
        "tracking_deviation",
        ctx.config.epsilon + 10.0 * ctx.config.rel_tol - report.max_deviation,
        0.0, "max deviation = " + fmt(report.max_deviation),
        "variant: " + report.variant);
  }
  ctx.add(std::move(cert));
}

void run_kl_experiment(Context& ctx) {
  const Desingularizer psi(ctx.config.psi_c, ctx.config.psi_theta,
                           ctx.config.psi_t_break);
  const std::vector<double> V = ctx.critical_values_or_default();
  const Region& region = *ctx.config.region;

  std::vector<Vector> samples;
  if (ctx.config.grid >= 2 && ctx.problem.dim == 2) {
    const double r = region.circumradius();
    const Vector& c = region.center();
    const int n = ctx.config.grid;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Vector x(2);
        x[0] = c[0] - r + 2.0 * r * i / (n - 1);
        x[1] = c[1] - r + 2.0 * r * j / (n - 1);
        if (region.contains(x)) samples.push_back(x);
      }
    }
  } else {
    Rng rng = Rng::child(ctx.seed, 0x6B1);
    samples.reserve(ctx.config.samples);
    for (int i = 0; i < ctx.config.samples; ++i) {
      samples.push_back(rng.in_region(region));
    }
  }

  const std::string path = ctx.path("samples.csv");
  CsvWriter csv(path,
                "f,f_tilde,grad_norm,kl_value" + coord_header(ctx.problem.dim));
  for (const Vector& x : samples) {
    const Evaluation ev = eval_objective(ctx.problem, x);
    const double ft = f_tilde(ev.value, V);
    const double gn = ev.gradient.norm();
    const double kl = (ft == 0.0 || gn < 1e-12)
                          ? std::numeric_limits<double>::quiet_NaN()
                          : psi.deriv(ft) * gn;
    std::vector<std::string> cells = {fmt(ev.value), fmt(ft), fmt(gn), fmt(kl)};
    const auto xs = coords(x);
    cells.insert(cells.end(), xs.begin(), xs.end());
    csv.row(cells);
  }
  ctx.outcome.files_written.push_back(path);

  ctx.extra["n_samples"] = samples.size();
  ctx.add(kl_check(ctx.problem, psi, V, samples));
}

void run_length_cert_experiment(Context& ctx) {
  const Desingularizer psi(ctx.config.psi_c, ctx.config.psi_theta,
                           ctx.config.psi_t_break);
  const Region& region = *ctx.config.region;
  ObjectiveProblem problem = ctx.problem;
  if (ctx.config.critical_values) {
    problem.critical_values = *ctx.config.critical_values;
  }
  const LipschitzEstimate lip = ctx.lipschitz(region);
  const double escape =
      region.center().norm() + region.circumradius() * (1.0 + 1e-9);

  const int n = ctx.config.seeds;
  std::vector<CertificateReport> cont(n), disc(n);
  std::vector<double> flow_len(n), gd_len(n);
  parallel_for(n, ctx.options.threads, [&](int i) {
    Rng rng = Rng::child(ctx.seed, static_cast<std::uint64_t>(i));
    const Vector x0 = ctx.config.start_radius > 0.0
                          ? rng.in_ball(region.center(), ctx.config.start_radius)
                          : rng.in_region(region);

    const FlowTrajectory flow = integrate_flow(
        problem, x0, ctx.config.horizon, ctx.config.rel_tol, 10.0 * escape + 1.0);
    flow_len[i] = flow.arc_length;
    cont[i] = continuous_length_certificate(flow, problem, psi, ctx.config.m,
                                            std::nullopt, region);

    const DiscreteTrajectory traj =
        run_gd(problem, x0, StepSchedule::constant(ctx.config.alpha),
               ctx.config.max_iter, ctx.config.grad_tol, escape);
    gd_len[i] = traj.length();
    disc[i] = discrete_length_certificate(traj, problem, psi, ctx.config.m,
                                          ctx.config.eps_slack, lip.L, lip.M,
                                          region);
  });

  const std::string path = ctx.path("lengths.csv");
  CsvWriter csv(path,
                "seed,flow_length,flow_margin,flow_status,gd_length,gd_margin,"
                "gd_status");
  const auto status = [](const CertificateReport& c) {
    return c.invalidated ? "invalidated" : (c.pass ? "pass" : "fail");
  };
  for (int i = 0; i < n; ++i) {
    csv.row({std::to_string(i), fmt(flow_len[i]), fmt(cont[i].margin),
             status(cont[i]), fmt(gd_len[i]), fmt(disc[i].margin),
             status(disc[i])});
  }
  ctx.outcome.files_written.push_back(path);

  // Aggregate: worst margin per certificate family; any invalidation is
  // surfaced as such.
  const auto aggregate = [&](const std::vector<CertificateReport>& parts,
                             const std::string& name) {
    int worst = -1;
    int invalid = -1;
    for (int i = 0; i < n; ++i) {
      if (parts[i].invalidated) {
        if (invalid < 0) invalid = i;
        continue;
      }
      if (worst < 0 || parts[i].margin < parts[worst].margin) worst = i;
    }
    if (invalid >= 0) {
      ctx.add(invalidated_certificate(
          name, "seed " + std::to_string(invalid) + ": " + parts[invalid].note));
    } else {
      CertificateReport c = parts[worst];
      c.name = name;
      c.worst = "seed " + std::to_string(worst) + " (" + c.worst + ")";
      c.note += "; " + std::to_string(n) + " trajectories";
      ctx.add(std::move(c));
    }
  };
  aggregate(cont, "length_continuous");
  aggregate(disc, "length_discrete");
  ctx.extra["L"] = lip.L;
  ctx.extra["M"] = lip.M;
}

void run_decrease_experiment(Context& ctx) {
  const DecreaseResult result = uniform_decrease_experiment(
      ctx.problem, ctx.config.alpha, ctx.config.inits, ctx.seed,
      ctx.config.init_radius, ctx.config.exit_radius, ctx.config.max_iter,
      ctx.options.threads);

  const std::string path = ctx.path("runs.csv");
  CsvWriter csv(path, "i,x0_0,x0_1,f0,f_end,decrease,steps,exited");
  for (std::size_t i = 0; i < result.runs.size(); ++i) {
    const DecreaseRun& r = result.runs[i];
    csv.row({std::to_string(i), fmt(r.x0[0]), fmt(r.x0[1]), fmt(r.f0),
             fmt(r.f_end), fmt(r.f0 - r.f_end), std::to_string(r.steps),
             r.exited ? "1" : "0"});
  }
  ctx.outcome.files_written.push_back(path);

  ctx.extra["threshold"] = result.threshold;
  ctx.extra["n_exited"] = result.n_exited;
  ctx.extra["n_not_exited"] = result.n_not_exited;
  ctx.add(result.certificate);
}

void run_saddle_mc_experiment(Context& ctx) {
  EscapeOptions opts;
  opts.grad_tol = ctx.config.grad_tol;
  opts.max_iter = ctx.config.max_iter;
  opts.escape_radius = ctx.config.escape_radius;
  opts.threads = ctx.options.threads;
  const EscapeResult result =
      escape_monte_carlo(ctx.problem, *ctx.config.region, ctx.config.alpha,
                         ctx.config.trials, ctx.seed, opts);

  const std::string path = ctx.path("trials.csv");
  CsvWriter csv(path, "i,grad_norm,min_eig,max_eig,classification" +
                          coord_header(ctx.problem.dim));
  for (int i = 0; i < result.n_trials; ++i) {
    const SaddleReport& r = result.reports[i];
    std::vector<std::string> cells = {
        std::to_string(i), fmt(r.grad_norm), fmt(r.eigenvalues[0]),
        fmt(r.eigenvalues[r.eigenvalues.size() - 1]),
        to_string(r.classification)};
    const auto xs = coords(r.point);
    cells.insert(cells.end(), xs.begin(), xs.end());
    csv.row(cells);
  }
  ctx.outcome.files_written.push_back(path);

  ctx.extra["saddle_fraction"] = result.saddle_fraction;
  ctx.extra["n_converged"] = result.n_converged;
  ctx.extra["n_nonconverged"] = result.n_nonconverged;
  ctx.extra["n_unbounded"] = result.n_unbounded;
  ctx.add(make_certificate(
      "saddle_escape_fraction",
      ctx.config.threshold - result.saddle_fraction, 0.0,
      std::to_string(result.n_saddle_limits) + " saddle limits of " +
          std::to_string(result.n_trials) + " trials",
      result.n_unbounded > 0
          ? "unbounded trials present: step size may be too large"
          : ""));
}

void run_sigma_experiment(Context& ctx) {
  SigmaMode mode = SigmaMode::continuous;
  if (ctx.config.sigma_mode == "continuous_T") mode = SigmaMode::continuous_T;
  if (ctx.config.sigma_mode == "discrete") mode = SigmaMode::discrete;
  SigmaOptions opts;
  opts.flow_rel_tol = ctx.config.rel_tol;
  opts.grad_tol = ctx.config.grad_tol;
  opts.max_iter = ctx.config.max_iter;
  opts.escape_radius = ctx.config.escape_radius;
  opts.sup_f = ctx.config.sup_f;
  opts.threads = ctx.options.threads;
  const SigmaEstimate est = estimate_sigma(
      ctx.problem, *ctx.config.region, mode, ctx.config.sigma_alpha_bar,
      ctx.config.horizon, ctx.config.samples, ctx.seed, opts);

  const std::string path = ctx.path("samples.csv");
  CsvWriter csv(path, "i,length");
  for (std::size_t i = 0; i < est.lengths.size(); ++i) {
    csv.row({std::to_string(i), fmt(est.lengths[i])});
  }
  ctx.outcome.files_written.push_back(path);

  ctx.extra["mode"] = to_string(est.mode);
  ctx.extra["max_length"] = est.max_length;
  ctx.extra["argmax"] = est.argmax;
  ctx.extra["blowup"] = est.blowup;
  ctx.extra["note"] = est.note;
  if (est.analytic_bound) ctx.extra["analytic_bound"] = *est.analytic_bound;

  if (est.blowup) {
    ctx.add(invalidated_certificate("sigma_estimate",
                                    "estimate aborted: " + est.note));
    return;
  }
  if (est.analytic_bound) {
    ctx.add(make_certificate(
        "sigma_T_bound", *est.analytic_bound - est.max_length,
        100.0 * opts.flow_rel_tol,
        "max length = " + fmt(est.max_length),
        "bound = " + fmt(*est.analytic_bound) + " (" + est.note + ")"));
  }
}

}  // namespace

std::string build_git_describe() { return FLOWCERT_GIT_DESCRIBE; }

RunOutcome run_experiment(const ExperimentConfig& config,
                          const RunOptions& options) {
  std::filesystem::create_directories(options.out_dir);

  Context ctx{config, options, options.seed_override.value_or(config.seed),
              problem_from_config(config), {}, {}};

  switch (config.kind) {
    case ExperimentKind::gd: run_gd_experiment(ctx); break;
    case ExperimentKind::flow: run_flow_experiment(ctx); break;
    case ExperimentKind::tracking: run_tracking_experiment(ctx); break;
    case ExperimentKind::kl_check: run_kl_experiment(ctx); break;
    case ExperimentKind::length_cert: run_length_cert_experiment(ctx); break;
    case ExperimentKind::decrease: run_decrease_experiment(ctx); break;
    case ExperimentKind::saddle_mc: run_saddle_mc_experiment(ctx); break;
    case ExperimentKind::sigma: run_sigma_experiment(ctx); break;
  }

  json report;
  report["experiment"] = to_string(config.kind);
  report["problem"] = config.problem_id;
  report["seed"] = ctx.seed;
  report["tolerance_scale"] = options.tolerance_scale;
  report["git_describe"] = build_git_describe();
  report["data"] = ctx.extra.is_null() ? json::object() : ctx.extra;
  json certs = json::array();
  int n_pass = 0, n_fail = 0, n_invalid = 0;
  for (const auto& c : ctx.outcome.certificates) {
    certs.push_back(certificate_json(c));
    if (c.invalidated) {
      ++n_invalid;
    } else if (c.pass) {
      ++n_pass;
    } else {
      ++n_fail;
    }
  }
  report["certificates"] = certs;
  report["summary"] = {{"n_pass", n_pass},
                       {"n_fail", n_fail},
                       {"n_invalidated", n_invalid},
                       {"all_pass", ctx.outcome.all_pass()}};

  const std::string report_path = ctx.path("report.json");
  {
    std::ofstream out(report_path);
    if (!out) throw std::runtime_error("cannot write '" + report_path + "'");
    out << report.dump(2) << "\n";
  }
  ctx.outcome.files_written.push_back(report_path);
  return ctx.outcome;
}

}  // namespace flowcert
