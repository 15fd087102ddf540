#include <CLI11.hpp>

#include <cstdio>
#include <string>

#include "flowcert/acceptance.hpp"
#include "flowcert/runner.hpp"

namespace {

int cmd_run(const std::string& config_path, const flowcert::RunOptions& options) {
  const flowcert::ParseResult parsed =
      flowcert::parse_config_file(config_path);
  if (!parsed.ok()) {
    std::fprintf(stderr, "config '%s' is invalid:\n", config_path.c_str());
    for (const std::string& e : parsed.errors) {
      std::fprintf(stderr, "  - %s\n", e.c_str());
    }
    return 2;
  }
  try {
    const flowcert::RunOutcome outcome =
        flowcert::run_experiment(*parsed.config, options);
    for (const auto& cert : outcome.certificates) {
      const char* status =
          cert.invalidated ? "INVALID" : (cert.pass ? "PASS" : "FAIL");
      std::printf("[%s] %s: margin %.6g (tolerance %.3g) %s\n", status,
                  cert.name.c_str(), cert.margin, cert.tolerance,
                  cert.note.c_str());
    }
    for (const std::string& f : outcome.files_written) {
      std::printf("wrote %s\n", f.c_str());
    }
    if (!outcome.all_pass()) {
      std::fprintf(stderr, "experiment has failing or invalidated certificates\n");
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int cmd_list_problems() {
  std::printf("catalog problems:\n");
  std::printf("  quadratic             f(x) = ||x||^2 / 2            (problem.dim)\n");
  std::printf("  cubic_saddle          f(x1,x2) = x1^3 - x1^2 x2\n");
  std::printf("  negative_quartic      f(x) = -x^4 / 4               (finite-time blow-up)\n");
  std::printf("  scalar_factorization  f(x,y) = (x y - target)^2     (problem.target_value)\n");
  std::printf("  matrix_factorization  f(X,Y) = ||X Y^T - M||_F^2    (problem.rows/cols/rank/target)\n");
  return 0;
}

int cmd_verify(int threads) {
  const auto results = flowcert::run_acceptance_suite(threads);
  return flowcert::report_acceptance(results) == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "flowcert: gradient method / gradient flow certificates\n"
      "\n"
      "Experiment CSV columns (per kind):\n"
      "  gd           trajectory.csv: k,t,alpha,f,grad_norm,cum_length,x0..\n"
      "  flow         trajectory.csv: i,t,f,grad_norm,cum_arc_length,x0..\n"
      "  tracking     deviations.csv: k,t,deviation\n"
      "  kl-check     samples.csv:    f,f_tilde,grad_norm,kl_value,x0..\n"
      "  length-cert  lengths.csv:    seed,flow_length,flow_margin,flow_status,\n"
      "                               gd_length,gd_margin,gd_status\n"
      "  decrease     runs.csv:       i,x0_0,x0_1,f0,f_end,decrease,steps,exited\n"
      "  saddle-mc    trials.csv:     i,grad_norm,min_eig,max_eig,classification,x0..\n"
      "  sigma        samples.csv:    i,length\n"};
  app.require_subcommand(1);

  flowcert::RunOptions options;
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;

  CLI::App* run = app.add_subcommand(
      "run",
      "run one experiment config\n"
      "\n"
      "Config documents are `key = value` lines; '#' starts a comment.\n"
      "Common keys: experiment, problem, seed, out, problem.dim,\n"
      "  problem.target_value, problem.rows/cols/rank/target (row-major).\n"
      "Per kind:\n"
      "  gd           x0, alpha | schedule.alphas, max_iter, grad_tol,\n"
      "               escape_radius\n"
      "  flow         x0, horizon, rel_tol, escape_radius\n"
      "  tracking     x0, epsilon, horizon, rel_tol, region.*, auto_alpha,\n"
      "               alpha, lipschitz.L/M | lipschitz.samples\n"
      "  kl-check     psi.c/theta/t_break, critical_values, region.*,\n"
      "               samples | grid\n"
      "  length-cert  psi.*, critical_values, m, eps_slack, region.*,\n"
      "               start_radius, alpha, horizon, rel_tol, grad_tol,\n"
      "               max_iter, seeds, lipschitz.*\n"
      "  decrease     alpha (<= 1e-4), inits, init_radius, exit_radius,\n"
      "               max_iter (cubic_saddle only)\n"
      "  saddle-mc    region.*, alpha, trials, threshold, grad_tol,\n"
      "               max_iter, escape_radius\n"
      "  sigma        region.*, sigma.mode (continuous|continuous_T|discrete),\n"
      "               sigma.alpha_bar, sigma.sup_f, horizon, samples,\n"
      "               rel_tol, grad_tol, max_iter, escape_radius\n"
      "Region keys: region.kind (ball|box), region.center,\n"
      "  region.radius | region.half_widths.\n");
  run->add_option("config", config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out-dir", options.out_dir, "output directory")
      ->capture_default_str();
  run->add_option("--threads", options.threads, "worker threads")
      ->capture_default_str();
  run->add_option("--tolerance-scale", options.tolerance_scale,
                  "multiplies certificate tolerance budgets")
      ->capture_default_str();
  run->add_option("--seed", seed, "override the config seed")
      ->each([&](const std::string&) { seed_set = true; });

  CLI::App* list = app.add_subcommand("list-problems", "list catalog problems");

  int verify_threads = 1;
  CLI::App* verify =
      app.add_subcommand("verify", "run the built-in acceptance suite");
  verify->add_option("--threads", verify_threads, "worker threads")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    if (seed_set) options.seed_override = seed;
    return cmd_run(config_path, options);
  }
  if (list->parsed()) return cmd_list_problems();
  if (verify->parsed()) return cmd_verify(verify_threads);
  return 2;
}
