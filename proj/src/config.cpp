#include "flowcert/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace flowcert {

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::gd: return "gd";
    case ExperimentKind::flow: return "flow";
    case ExperimentKind::tracking: return "tracking";
    case ExperimentKind::kl_check: return "kl-check";
    case ExperimentKind::length_cert: return "length-cert";
    case ExperimentKind::decrease: return "decrease";
    case ExperimentKind::saddle_mc: return "saddle-mc";
    case ExperimentKind::sigma: return "sigma";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<ExperimentKind> kind_from_string(const std::string& s) {
  static const std::map<std::string, ExperimentKind> table = {
      {"gd", ExperimentKind::gd},
      {"flow", ExperimentKind::flow},
      {"tracking", ExperimentKind::tracking},
      {"kl-check", ExperimentKind::kl_check},
      {"length-cert", ExperimentKind::length_cert},
      {"decrease", ExperimentKind::decrease},
      {"saddle-mc", ExperimentKind::saddle_mc},
      {"sigma", ExperimentKind::sigma},
  };
  const auto it = table.find(s);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

class Parser {
 public:
  explicit Parser(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        error("line " + std::to_string(lineno) + ": expected 'key = value'");
        continue;
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) {
        error("line " + std::to_string(lineno) + ": empty key");
        continue;
      }
      if (entries_.count(key)) {
        error("duplicate key '" + key + "'");
        continue;
      }
      entries_[key] = value;
    }
  }

  void error(std::string msg) { errors_.push_back(std::move(msg)); }
  std::vector<std::string>& errors() { return errors_; }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  /// Marks `key` as accepted for this kind and returns its raw value.
  std::optional<std::string> take(const std::string& key) {
    accepted_.insert(key);
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  double take_double(const std::string& key, double fallback) {
    const auto raw = take(key);
    if (!raw) return fallback;
    try {
      std::size_t pos = 0;
      const double v = std::stod(*raw, &pos);
      if (pos != raw->size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      error("key '" + key + "': expected a number, got '" + *raw + "'");
      return fallback;
    }
  }

  long long take_int(const std::string& key, long long fallback) {
    const auto raw = take(key);
    if (!raw) return fallback;
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(*raw, &pos);
      if (pos != raw->size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      error("key '" + key + "': expected an integer, got '" + *raw + "'");
      return fallback;
    }
  }

  bool take_bool(const std::string& key, bool fallback) {
    const auto raw = take(key);
    if (!raw) return fallback;
    if (*raw == "true") return true;
    if (*raw == "false") return false;
    error("key '" + key + "': expected true or false, got '" + *raw + "'");
    return fallback;
  }

  std::optional<std::vector<double>> take_list(const std::string& key) {
    const auto raw = take(key);
    if (!raw) return std::nullopt;
    std::vector<double> out;
    std::istringstream in(*raw);
    std::string item;
    while (std::getline(in, item, ',')) {
      item = trim(item);
      if (item.empty()) {
        error("key '" + key + "': empty list entry");
        return std::nullopt;
      }
      try {
        std::size_t pos = 0;
        out.push_back(std::stod(item, &pos));
        if (pos != item.size()) throw std::invalid_argument("");
      } catch (...) {
        error("key '" + key + "': bad list entry '" + item + "'");
        return std::nullopt;
      }
    }
    if (out.empty()) {
      error("key '" + key + "': empty list");
      return std::nullopt;
    }
    return out;
  }

  /// Reports every key that was present but never taken.
  void reject_unknown(ExperimentKind kind) {
    for (const auto& [key, value] : entries_) {
      if (!accepted_.count(key)) {
        error("key '" + key + "' is not recognized for experiment '" +
              std::string(to_string(kind)) + "'");
      }
    }
  }

 private:
  std::map<std::string, std::string> entries_;
  std::set<std::string> accepted_;
  std::vector<std::string> errors_;
};

std::optional<Region> take_region(Parser& p, int expected_dim) {
  const auto kind = p.take("region.kind");
  const auto center = p.take_list("region.center");
  const double radius = p.take_double("region.radius", 0.0);
  const auto half_widths = p.take_list("region.half_widths");
  if (!kind && !center && !(radius > 0.0) && !half_widths) return std::nullopt;
  if (!kind || !center) {
    p.error("region: region.kind and region.center are both required");
    return std::nullopt;
  }
  Vector c(center->size());
  for (std::size_t i = 0; i < center->size(); ++i) c[i] = (*center)[i];
  if (expected_dim > 0 && c.size() != expected_dim) {
    p.error("region.center: expected dimension " + std::to_string(expected_dim) +
            ", got " + std::to_string(c.size()));
    return std::nullopt;
  }
  try {
    if (*kind == "ball") {
      if (!(radius > 0.0)) {
        p.error("region.radius: must be positive for a ball region");
        return std::nullopt;
      }
      return Region::ball(c, radius);
    }
    if (*kind == "box") {
      if (!half_widths) {
        p.error("region.half_widths: required for a box region");
        return std::nullopt;
      }
      Vector hw(half_widths->size());
      for (std::size_t i = 0; i < half_widths->size(); ++i) {
        hw[i] = (*half_widths)[i];
      }
      return Region::box(c, hw);
    }
    p.error("region.kind: expected ball or box, got '" + *kind + "'");
  } catch (const std::exception& e) {
    p.error(std::string("region: ") + e.what());
  }
  return std::nullopt;
}

}  // namespace

ObjectiveProblem problem_from_config(const ExperimentConfig& config) {
  return make_problem(config.problem_id, config.params);
}

ParseResult parse_config(const std::string& text) {
  ParseResult result;
  Parser p(text);

  ExperimentConfig cfg;

  const auto kind_raw = p.take("experiment");
  if (!kind_raw) {
    p.error("missing required key 'experiment'");
  } else {
    const auto kind = kind_from_string(*kind_raw);
    if (!kind) {
      p.error("experiment: unknown kind '" + *kind_raw + "'");
    } else {
      cfg.kind = *kind;
    }
  }

  const auto problem = p.take("problem");
  if (!problem) {
    p.error("missing required key 'problem'");
  } else {
    cfg.problem_id = *problem;
    const auto ids = catalog_ids();
    if (std::find(ids.begin(), ids.end(), cfg.problem_id) == ids.end()) {
      p.error("problem: unknown id '" + cfg.problem_id + "'");
    }
  }

  // Problem parameters.
  cfg.params.dim = static_cast<int>(p.take_int("problem.dim", 2));
  if (cfg.params.dim < 1) p.error("problem.dim: must be >= 1");
  cfg.params.target_value = p.take_double("problem.target_value", 1.0);
  cfg.params.rank = static_cast<int>(p.take_int("problem.rank", 1));
  if (cfg.params.rank < 1) p.error("problem.rank: must be >= 1");
  {
    const long long rows = p.take_int("problem.rows", 2);
    const long long cols = p.take_int("problem.cols", 2);
    const auto target = p.take_list("problem.target");
    if (target) {
      if (rows < 1 || cols < 1 ||
          static_cast<long long>(target->size()) != rows * cols) {
        p.error("problem.target: expected problem.rows * problem.cols = " +
                std::to_string(rows * cols) + " entries, got " +
                std::to_string(target->size()));
      } else {
        Matrix t(rows, cols);
        for (long long r = 0; r < rows; ++r) {
          for (long long c = 0; c < cols; ++c) {
            t(r, c) = (*target)[r * cols + c];
          }
        }
        cfg.params.target = t;
      }
    }
  }

  int dim = 0;
  if (p.errors().empty() && !cfg.problem_id.empty()) {
    try {
      dim = problem_from_config(cfg).dim;
    } catch (const std::exception& e) {
      p.error(std::string("problem: ") + e.what());
    }
  }

  cfg.seed = static_cast<std::uint64_t>(p.take_int("seed", 1));
  if (const auto out = p.take("out")) cfg.out_prefix = *out;

  const auto take_x0 = [&]() {
    if (const auto x0 = p.take_list("x0")) {
      Vector v(x0->size());
      for (std::size_t i = 0; i < x0->size(); ++i) v[i] = (*x0)[i];
      if (dim > 0 && v.size() != dim) {
        p.error("x0: expected dimension " + std::to_string(dim) + ", got " +
                std::to_string(v.size()));
      } else {
        cfg.x0 = v;
      }
    }
  };
  const auto require_x0 = [&]() {
    take_x0();
    if (!cfg.x0 && !p.has("x0")) p.error("missing required key 'x0'");
  };
  const auto take_tols = [&](bool with_escape) {
    cfg.max_iter = p.take_int("max_iter", cfg.max_iter);
    if (cfg.max_iter < 1) p.error("max_iter: must be >= 1");
    cfg.grad_tol = p.take_double("grad_tol", cfg.grad_tol);
    if (cfg.grad_tol < 0.0) p.error("grad_tol: must be >= 0");
    if (with_escape) {
      cfg.escape_radius = p.take_double("escape_radius", cfg.escape_radius);
      if (!(cfg.escape_radius > 0.0)) p.error("escape_radius: must be > 0");
    }
  };
  const auto take_flow = [&]() {
    cfg.horizon = p.take_double("horizon", cfg.horizon);
    if (!(cfg.horizon > 0.0)) p.error("horizon: must be > 0");
    cfg.rel_tol = p.take_double("rel_tol", cfg.rel_tol);
    if (!(cfg.rel_tol > 1e-13 && cfg.rel_tol < 1e-2)) {
      p.error("rel_tol: must lie in (1e-13, 1e-2)");
    }
  };
  const auto take_alpha = [&](bool required) {
    cfg.alpha = p.take_double("alpha", cfg.alpha);
    if (p.has("alpha") && !(cfg.alpha > 0.0)) {
      p.error("alpha: must be positive");
    } else if (required && !p.has("alpha")) {
      p.error("missing required key 'alpha'");
    }
  };
  const auto take_psi = [&]() {
    cfg.psi_c = p.take_double("psi.c", cfg.psi_c);
    cfg.psi_theta = p.take_double("psi.theta", cfg.psi_theta);
    cfg.psi_t_break = p.take_double("psi.t_break", cfg.psi_t_break);
    if (!(cfg.psi_c > 0.0)) p.error("psi.c: must be positive");
    if (!(cfg.psi_theta > 0.0 && cfg.psi_theta <= 1.0)) {
      p.error("psi.theta: must lie in (0, 1]");
    }
    if (!(cfg.psi_t_break > 0.0)) p.error("psi.t_break: must be positive");
    if (const auto v = p.take_list("critical_values")) {
      auto sorted = *v;
      std::sort(sorted.begin(), sorted.end());
      cfg.critical_values = sorted;
    }
  };
  const auto take_lipschitz = [&]() {
    if (p.has("lipschitz.L")) cfg.lipschitz_L = p.take_double("lipschitz.L", 0.0);
    if (p.has("lipschitz.M")) cfg.lipschitz_M = p.take_double("lipschitz.M", 0.0);
    if (cfg.lipschitz_L && !(*cfg.lipschitz_L > 0.0)) p.error("lipschitz.L: must be > 0");
    if (cfg.lipschitz_M && !(*cfg.lipschitz_M > 0.0)) p.error("lipschitz.M: must be > 0");
    cfg.lipschitz_samples =
        static_cast<int>(p.take_int("lipschitz.samples", cfg.lipschitz_samples));
    if (cfg.lipschitz_samples < 2) p.error("lipschitz.samples: must be >= 2");
  };
  const auto take_region = [&](bool required) {
    cfg.region = flowcert::take_region(p, dim);
    if (required && !cfg.region) {
      if (p.errors().empty() || !p.has("region.kind")) {
        p.error("missing region.* keys (region.kind, region.center, ...)");
      }
    }
  };

  switch (cfg.kind) {
    case ExperimentKind::gd:
      require_x0();
      take_alpha(!p.has("schedule.alphas"));
      if (const auto seq = p.take_list("schedule.alphas")) {
        cfg.alphas = *seq;
        for (double a : cfg.alphas) {
          if (!(a > 0.0)) {
            p.error("schedule.alphas: all steps must be positive");
            break;
          }
        }
      }
      take_tols(true);
      break;
    case ExperimentKind::flow:
      require_x0();
      take_flow();
      cfg.escape_radius = p.take_double("escape_radius", cfg.escape_radius);
      if (!(cfg.escape_radius > 0.0)) p.error("escape_radius: must be > 0");
      break;
    case ExperimentKind::tracking:
      require_x0();
      take_flow();
      take_region(true);
      take_lipschitz();
      cfg.epsilon = p.take_double("epsilon", cfg.epsilon);
      if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) {
        p.error("epsilon: must lie in (0, 1)");
      }
      cfg.auto_alpha = p.take_bool("auto_alpha", true);
      take_alpha(false);
      if (!cfg.auto_alpha && !(cfg.alpha > 0.0)) {
        p.error("alpha: required when auto_alpha = false");
      }
      break;
    case ExperimentKind::kl_check:
      take_psi();
      take_region(true);
      cfg.samples = static_cast<int>(p.take_int("samples", cfg.samples));
      cfg.grid = static_cast<int>(p.take_int("grid", cfg.grid));
      if (cfg.samples < 1 && cfg.grid < 2) {
        p.error("kl-check: need samples >= 1 or grid >= 2");
      }
      if (cfg.grid > 0 && dim != 2) {
        p.error("grid: only available for 2-d problems");
      }
      break;
    case ExperimentKind::length_cert:
      take_psi();
      take_region(true);
      take_flow();
      take_tols(false);
      take_alpha(true);
      take_lipschitz();
      cfg.m = static_cast<int>(p.take_int("m", cfg.m));
      if (cfg.m < 1) p.error("m: must be >= 1");
      cfg.eps_slack = p.take_double("eps_slack", cfg.eps_slack);
      if (!(cfg.eps_slack > 0.0)) p.error("eps_slack: must be > 0");
      cfg.seeds = static_cast<int>(p.take_int("seeds", cfg.seeds));
      if (cfg.seeds < 1) p.error("seeds: must be >= 1");
      cfg.start_radius = p.take_double("start_radius", 0.0);
      if (cfg.start_radius < 0.0) p.error("start_radius: must be >= 0");
      break;
    case ExperimentKind::decrease:
      if (cfg.problem_id != "cubic_saddle") {
        p.error("decrease: problem must be cubic_saddle");
      }
      take_alpha(true);
      if (cfg.alpha > 1e-4) p.error("alpha: decrease experiment requires alpha <= 1e-4");
      cfg.inits = static_cast<int>(p.take_int("inits", cfg.inits));
      if (cfg.inits < 1) p.error("inits: must be >= 1");
      cfg.init_radius = p.take_double("init_radius", cfg.init_radius);
      cfg.exit_radius = p.take_double("exit_radius", cfg.exit_radius);
      if (!(cfg.init_radius > 0.0)) p.error("init_radius: must be > 0");
      if (!(cfg.exit_radius > cfg.init_radius)) {
        p.error("exit_radius: must exceed init_radius");
      }
      cfg.max_iter = p.take_int("max_iter", 20'000'000);
      if (cfg.max_iter < 1) p.error("max_iter: must be >= 1");
      break;
    case ExperimentKind::saddle_mc:
      take_region(true);
      take_alpha(true);
      cfg.trials = static_cast<int>(p.take_int("trials", cfg.trials));
      if (cfg.trials < 1) p.error("trials: must be >= 1");
      cfg.threshold = p.take_double("threshold", cfg.threshold);
      if (!(cfg.threshold >= 0.0 && cfg.threshold <= 1.0)) {
        p.error("threshold: must lie in [0, 1]");
      }
      take_tols(true);
      break;
    case ExperimentKind::sigma: {
      take_region(true);
      const auto mode = p.take("sigma.mode");
      if (mode) cfg.sigma_mode = *mode;
      if (cfg.sigma_mode != "continuous" && cfg.sigma_mode != "continuous_T" &&
          cfg.sigma_mode != "discrete") {
        p.error("sigma.mode: expected continuous, continuous_T, or discrete");
      }
      cfg.sigma_alpha_bar = p.take_double("sigma.alpha_bar", 0.0);
      if (cfg.sigma_mode == "discrete" && !(cfg.sigma_alpha_bar > 0.0)) {
        p.error("sigma.alpha_bar: required and positive in discrete mode");
      }
      if (p.has("sigma.sup_f")) cfg.sup_f = p.take_double("sigma.sup_f", 0.0);
      cfg.samples = static_cast<int>(p.take_int("samples", 200));
      if (cfg.samples < 1) p.error("samples: must be >= 1");
      take_flow();
      take_tols(true);
      break;
    }
  }

  p.reject_unknown(cfg.kind);

  result.errors = p.errors();
  if (result.errors.empty()) result.config = cfg;
  return result;
}

ParseResult parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ParseResult r;
    r.errors.push_back("cannot open config file '" + path + "'");
    return r;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace flowcert
