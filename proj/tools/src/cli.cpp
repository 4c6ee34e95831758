#include "adahuber/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "adahuber/dataset.hpp"
#include "adahuber/errors.hpp"
#include "adahuber/experiments.hpp"
#include "adahuber/glasso.hpp"
#include "adahuber/huber.hpp"
#include "adahuber/inference.hpp"
#include "adahuber/json_io.hpp"
#include "adahuber/lepski.hpp"
#include "adahuber/scale_bounds.hpp"
#include "adahuber/score.hpp"

namespace adahuber::cli {
namespace {

namespace fs = std::filesystem;

/// Invalid flags, config or arguments: exit 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Graphical lasso stopped before its tolerance: exit 2.
class GlassoNotConverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::set<std::string> kSubcommands = {"fit", "adapt", "debias", "ci", "simulate", "check"};

Json value_json(const std::string& v) { return v; }
Json value_json(bool v) { return v; }
Json value_json(int v) { return v; }
Json value_json(long v) { return v; }
Json value_json(long long v) { return v; }
Json value_json(unsigned long v) { return v; }
Json value_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return finite_or_null(v);
}
template <typename T>
Json value_json(const std::vector<T>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(value_json(x));
  return a;
}
template <typename T>
Json value_json(const std::optional<T>& v) {
  return v ? value_json(*v) : Json(nullptr);
}

/// A subcommand together with the bound variables that make up its
/// effective configuration.
struct Command {
  CLI::App* app = nullptr;
  std::string name;
  std::vector<std::pair<std::string, std::function<Json()>>> fields;
  std::string config;
  std::string manifest;

  template <typename T>
  CLI::Option* option(const std::string& key, T& var, const std::string& desc) {
    fields.emplace_back(key, [&var] { return value_json(var); });
    return app->add_option("--" + key, var, desc);
  }
  CLI::Option* flag(const std::string& key, bool& var, const std::string& desc) {
    fields.emplace_back(key, [&var] { return value_json(var); });
    return app->add_flag("--" + key, var, desc);
  }
  CLI::Option* positional(const std::string& key, std::string& var, const std::string& desc) {
    fields.emplace_back(key, [&var] { return value_json(var); });
    return app->add_option(key, var, desc);
  }
  void add_meta_options() {
    app->add_option("--config", config, "JSON config file (schema 1); flags take precedence");
    app->add_option("--manifest", manifest, "Where to write the run manifest");
  }

  Json effective() const {
    Json j;
    for (const auto& [key, get] : fields) j[key] = get();
    return j;
  }
};

std::vector<std::string> config_strings(const Json& v, const std::string& key) {
  auto scalar = [&](const Json& x) -> std::string {
    if (x.is_string()) return x.get<std::string>();
    if (x.is_boolean()) return x.get<bool>() ? "true" : "false";
    if (x.is_number()) return x.dump();
    throw UsageError("config: value of \"" + key + "\" must be a scalar or an array of scalars");
  };
  std::vector<std::string> out;
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(scalar(x));
  } else {
    out.push_back(scalar(v));
  }
  return out;
}

/// Fills every option not given on the command line from the subcommand's
/// section of the config file.
void apply_config(Command& cmd) {
  if (cmd.config.empty()) return;
  Json j;
  try {
    j = read_json(cmd.config);
  } catch (const ParseError& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config: top level must be a JSON object");
  if (!j.contains("schema") || j.at("schema") != 1) throw UsageError("config: \"schema\": 1 is required");
  for (const auto& item : j.items()) {
    if (item.key() != "schema" && item.key() != "versions" && !kSubcommands.count(item.key())) {
      throw UsageError("config: unknown key \"" + item.key() + "\"");
    }
  }
  if (!j.contains(cmd.name)) return;
  const Json& section = j.at(cmd.name);
  if (!section.is_object()) throw UsageError("config: section \"" + cmd.name + "\" must be an object");
  std::set<std::string> known;
  for (const auto& f : cmd.fields) known.insert(f.first);
  for (const auto& item : section.items()) {
    const std::string& key = item.key();
    if (!known.count(key)) throw UsageError("config: unknown key \"" + key + "\" in section \"" + cmd.name + "\"");
    CLI::Option* opt = cmd.app->get_option_no_throw("--" + key);
    if (opt == nullptr) opt = cmd.app->get_option_no_throw(key);
    if (opt == nullptr || opt->count() > 0 || item.value().is_null()) continue;
    try {
      opt->add_result(config_strings(item.value(), key));
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError("config: bad value for \"" + key + "\": " + e.what());
    }
  }
}

Json versions() {
  Json v;
  v["adahuber"] = ADAHUBER_VERSION;
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  v["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  return v;
}

/// Same layout as a config file, so `--config <manifest>` replays the run.
void write_manifest(const Command& cmd, const fs::path& default_path) {
  Json m;
  m["schema"] = 1;
  m[cmd.name] = cmd.effective();
  m["versions"] = versions();
  write_json(m, cmd.manifest.empty() ? default_path : fs::path(cmd.manifest));
}

fs::path sibling_manifest(const std::string& out) {
  fs::path p(out);
  return p.parent_path() / (p.stem().string() + ".manifest.json");
}

// ---------------------------------------------------------------------------
// Shared pieces

struct DataArgs {
  std::string data;
  std::string y = "y";

  void add(Command& cmd) {
    cmd.positional("data", data, "Input CSV file");
    cmd.option("y", y, "Response column: header name or 1-based position");
  }
  Dataset load() const {
    if (data.empty()) throw UsageError("an input CSV file is required");
    ColumnRef ref = y;
    if (!y.empty() && std::all_of(y.begin(), y.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      std::size_t pos = 0;
      std::from_chars(y.data(), y.data() + y.size(), pos);
      if (pos == 0) throw UsageError("--y: column positions are 1-based; 0 is not valid");
      ref = pos - 1;
    }
    try {
      return load_csv(data, ref);
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
};

struct SolverArgs {
  double b = 1.0;
  std::optional<double> eta;
  double shrink = 0.5;
  double tol = 1e-10;
  double kkt_tol = 1e-8;
  int max_iter = 20000;

  void add(Command& cmd) {
    cmd.option("b", b, "Weight radius b in w(x) = min(1, b/||x||); inf disables weighting");
    cmd.option("eta", eta, "Fixed step curvature (default: backtracking)");
    cmd.option("shrink", shrink, "Backtracking factor");
    cmd.option("tol", tol, "Relative objective decrease tolerance");
    cmd.option("kkt-tol", kkt_tol, "KKT residual tolerance");
    cmd.option("max-iter", max_iter, "Iteration cap");
  }
  HuberConfig config() const {
    HuberConfig cfg;
    if (!(b > 0.0)) throw UsageError("b must be positive");
    cfg.weights = std::isinf(b) ? WeightSpec::unweighted() : WeightSpec::identity(b);
    if (eta) {
      cfg.step = FixedStep{*eta};
    } else {
      Backtracking bt;
      bt.shrink = shrink;
      cfg.step = bt;
    }
    cfg.tol = tol;
    cfg.kkt_tol = kkt_tol;
    cfg.max_iter = max_iter;
    return cfg;
  }
};

// ---------------------------------------------------------------------------
// fit

struct FitCmd {
  Command cmd;
  DataArgs data;
  SolverArgs solver;
  std::optional<double> tau;
  std::optional<double> lambda;
  std::string out = "est.json";

  void add(CLI::App& root) {
    cmd.app = root.add_subcommand("fit", "l1-penalized weighted Huber regression at a fixed tau");
    cmd.name = "fit";
    data.add(cmd);
    cmd.option("tau", tau, "Huber parameter (default: 3 MAD(y))");
    cmd.option("lambda", lambda, "Penalty (default: 0.005 b sqrt(log p / n))");
    solver.add(cmd);
    cmd.option("out", out, "Estimate JSON");
    cmd.add_meta_options();
  }

  int run(std::ostream& out_stream, std::ostream& err) {
    if (tau && !(*tau > 0.0)) throw UsageError("tau must be positive");
    if (lambda && !(*lambda > 0.0)) throw UsageError("lambda must be positive");
    const Dataset d = data.load();
    HuberConfig cfg = solver.config();
    if (!tau) tau = 3.0 * mad(d.y());
    if (!(*tau > 0.0)) throw UsageError("tau must be positive (3 MAD(y) is zero; pass --tau)");
    if (!lambda) lambda = default_lambda(cfg.weights.b_prime(), d.n(), d.p());
    cfg.tau = *tau;
    cfg.lambda = *lambda;
    try {
      cfg.validate(d.p());
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    const Estimate est = fit_huber(d, cfg);
    write_json(to_json_value(est), out);
    write_manifest(cmd, sibling_manifest(out));
    out_stream << "iterations " << est.iterations << ", kkt_residual " << est.kkt_residual << ", objective "
               << est.objective_final() << '\n';
    if (!est.converged) {
      err << "warning: solver stopped after " << est.iterations << " iterations without converging\n";
      return not_converged;
    }
    return ok;
  }
};

// ---------------------------------------------------------------------------
// adapt

struct AdaptCmd {
  Command cmd;
  DataArgs data;
  SolverArgs solver;
  long k = 1;
  double C = 20.0;
  double delta = 0.05;
  std::optional<int> M;
  std::optional<double> lambda;
  double tau_factor = 3.0;
  bool use_mad = false;
  bool fallback = false;
  std::string out = "result.json";

  void add(CLI::App& root) {
    cmd.app = root.add_subcommand("adapt", "Lepski selection of tau over a median-of-means scale grid");
    cmd.name = "adapt";
    data.add(cmd);
    cmd.option("k", k, "Sparsity level used in the thresholds");
    cmd.option("C", C, "Threshold constant");
    cmd.option("delta", delta, "Median-of-means confidence parameter");
    cmd.option("M", M, "Grid depth (default: ceil(2 n^(1/3)))");
    cmd.option("lambda", lambda, "Penalty (default: 0.005 b sqrt(log p / n))");
    cmd.option("tau-factor", tau_factor, "tau_j = tau_factor * sigma_j");
    cmd.flag("mad", use_mad, "Use MAD(y) instead of the median-of-means bound for sigma_max");
    cmd.flag("fallback", fallback, "Use the largest grid index when no index is selected");
    solver.add(cmd);
    cmd.option("out", out, "LepskiResult JSON");
    cmd.add_meta_options();
  }

  int run(std::ostream& out_stream, std::ostream& err) {
    if (k < 1) throw UsageError("k must be at least 1");
    if (!(delta > 0.0 && delta < 1.0)) throw UsageError("delta must lie in (0, 1)");
    if (M && *M < 1) throw UsageError("M must be at least 1");
    if (lambda && !(*lambda > 0.0)) throw UsageError("lambda must be positive");
    const Dataset d = data.load();
    LepskiConfig cfg;
    cfg.C = C;
    cfg.k = k;
    cfg.huber = solver.config();
    if (!M) M = default_grid_depth(d.n());
    if (!lambda) lambda = default_lambda(cfg.huber.weights.b_prime(), d.n(), d.p());
    cfg.M = M;
    cfg.lambda = lambda;
    cfg.tau_factor = tau_factor;
    cfg.fallback = fallback;
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    ScaleGrid grid;
    if (use_mad) {
      grid = sigma_bounds_mad(d.y(), *M);
    } else {
      MoMConfig mom;
      mom.delta = delta;
      grid = sigma_bounds(d.y(), mom, *M);
    }
    LepskiResult result;
    try {
      result = adaptive_fit(d, cfg, grid);
    } catch (const SelectionError& e) {
      err << "error: " << e.what() << " (pass --fallback to use the largest grid index)\n";
      return no_selection;
    }
    write_json(to_json_value(result), out);
    write_manifest(cmd, sibling_manifest(out));
    if (result.used_fallback) {
      err << "warning: no grid index passed every comparison; falling back to j = " << *result.j_star << '\n';
    }
    out_stream << "j_star " << *result.j_star << " of " << result.grid.M << ", tau "
               << tau_factor * result.grid.sigmas[static_cast<std::size_t>(*result.j_star - 1)] << '\n';
    return ok;
  }
};

// ---------------------------------------------------------------------------
// debias / ci

struct DebiasArgs {
  DataArgs data;
  std::string beta;
  std::string score = "t3";
  std::optional<double> glasso_lambda;
  double glasso_tol = 1e-8;
  int glasso_max_iter = 500;

  void add(Command& cmd) {
    data.add(cmd);
    cmd.option("beta", beta, "Pilot estimate JSON (output of fit or adapt)");
    cmd.option("score", score, "Score function: t3 or gaussian");
    cmd.option("glasso-lambda", glasso_lambda, "Graphical lasso penalty (default: 0.5 sqrt(log p / n))");
    cmd.option("glasso-tol", glasso_tol, "Graphical lasso KKT tolerance");
    cmd.option("glasso-max-iter", glasso_max_iter, "Graphical lasso sweep cap");
  }

  struct Prepared {
    Dataset data;
    ScoreFunction score;
    PrecisionEstimate theta;
    OneStepEstimate step;
  };

  Prepared prepare() {
    if (beta.empty()) throw UsageError("--beta is required");
    if (glasso_lambda && !(*glasso_lambda >= 0.0)) throw UsageError("glasso-lambda must be non-negative");
    ScoreFunction psi;
    try {
      psi = score_by_name(score);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    Dataset d = data.load();
    const VectorXd b = beta_from_json(read_json(beta));
    if (b.size() != d.p()) {
      throw UsageError("beta has " + std::to_string(b.size()) + " entries but the data has p = " +
                       std::to_string(d.p()));
    }
    if (!glasso_lambda) glasso_lambda = default_glasso_lambda(d.n(), d.p());
    PrecisionEstimate theta = graphical_lasso(sample_cov(d), *glasso_lambda, glasso_tol, glasso_max_iter);
    if (!theta.converged) {
      throw GlassoNotConverged("graphical lasso did not converge in " + std::to_string(theta.iterations) +
                               " sweeps (kkt_residual " + std::to_string(theta.kkt_residual) + ")");
    }
    OneStepEstimate step = one_step(d, b, theta.theta, psi);
    return {std::move(d), std::move(psi), std::move(theta), std::move(step)};
  }
};

Json glasso_summary(const PrecisionEstimate& theta) {
  return {{"lambda", theta.lambda},
          {"iterations", theta.iterations},
          {"converged", theta.converged},
          {"kkt_residual", finite_or_null(theta.kkt_residual)}};
}

struct DebiasCmd {
  Command cmd;
  DebiasArgs args;
  std::string out = "debias.json";

  void add(CLI::App& root) {
    cmd.app = root.add_subcommand("debias", "One-step correction of a pilot estimate");
    cmd.name = "debias";
    args.add(cmd);
    cmd.option("out", out, "OneStepEstimate JSON");
    cmd.add_meta_options();
  }

  int run(std::ostream& out_stream, std::ostream&) {
    const auto prep = args.prepare();
    Json j = to_json_value(prep.step);
    j["score"] = prep.score.name;
    j["glasso"] = glasso_summary(prep.theta);
    write_json(j, out);
    write_manifest(cmd, sibling_manifest(out));
    out_stream << "a_hat " << prep.step.diagnostics.a_hat << ", sigma_hat " << prep.step.diagnostics.sigma_hat
               << '\n';
    return ok;
  }
};

struct CiCmd {
  Command cmd;
  DebiasArgs args;
  std::vector<long long> J;
  double alpha = 0.1;
  std::string out = "ci.json";

  void add(CLI::App& root) {
    cmd.app = root.add_subcommand("ci", "Confidence region for coordinates J of the one-step estimate");
    cmd.name = "ci";
    args.add(cmd);
    cmd.option("J", J, "Coordinates, 1-based, comma separated (at most 10)")->delimiter(',');
    cmd.option("alpha", alpha, "Miscoverage level in (0, 1)");
    cmd.option("out", out, "ConfidenceRegion JSON");
    cmd.add_meta_options();
  }

  std::vector<Index> zero_based(Index p) const {
    if (J.empty()) throw UsageError("--J is required (1-based coordinates, e.g. --J 1,2)");
    if (J.size() > 10) throw UsageError("--J accepts at most 10 coordinates");
    std::vector<Index> idx;
    for (long long j : J) {
      if (j < 1) {
        throw UsageError("--J: coordinates are 1-based (1.." + std::to_string(p) + "); got " + std::to_string(j));
      }
      if (j > p) throw UsageError("--J: coordinate " + std::to_string(j) + " exceeds p = " + std::to_string(p));
      idx.push_back(static_cast<Index>(j - 1));
    }
    std::sort(idx.begin(), idx.end());
    if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) throw UsageError("--J: duplicate coordinate");
    return idx;
  }

  int run(std::ostream& out_stream, std::ostream&) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
    for (long long j : J) {
      if (j < 1) throw UsageError("--J: coordinates are 1-based; got " + std::to_string(j));
    }
    const auto prep = args.prepare();
    const std::vector<Index> idx = zero_based(prep.data.p());
    const ConfidenceRegion region = confidence_region(prep.data, prep.step, prep.theta.theta, idx, alpha);
    Json j = to_json_value(region);
    j["score"] = prep.score.name;
    j["glasso"] = glasso_summary(prep.theta);
    write_json(j, out);
    write_manifest(cmd, sibling_manifest(out));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out_stream << "beta_" << idx[i] + 1 << ": [" << region.intervals[i].first << ", " << region.intervals[i].second
                 << "]\n";
    }
    return ok;
  }
};

// ---------------------------------------------------------------------------
// simulate / check

struct ExperimentArgs {
  std::string scenario;
  std::optional<int> trials;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::vector<long> n;
  std::optional<long> p;
  long k = 4;
  double error_scale = 0.01;
  double C = 20.0;
  double delta = 0.05;
  double b = 1.0;
  std::optional<int> M;
  std::optional<double> lambda;
  std::optional<double> glasso_lambda;
  double alpha = 0.1;
  std::string sim_spec;

  void add(Command& cmd, bool required_scenario) {
    auto* s = cmd.option("scenario", scenario, "fig1, fig2, coverage or custom");
    if (required_scenario) s->description("fig1, fig2, coverage or custom (required)");
    cmd.option("trials", trials, "Trials per sample size (scenario default when unset)");
    cmd.option("seed", seed, "Master seed");
    cmd.option("out-dir", out_dir, "Output directory");
    cmd.option("n", n, "Sample sizes, comma separated")->delimiter(',');
    cmd.option("p", p, "Dimension");
    cmd.option("k", k, "Number of nonzero coefficients");
    cmd.option("error-scale", error_scale, "Scale applied to t3 errors");
    cmd.option("C", C, "Lepski threshold constant");
    cmd.option("delta", delta, "Median-of-means confidence parameter");
    cmd.option("b", b, "Weight radius");
    cmd.option("M", M, "Grid depth");
    cmd.option("lambda", lambda, "Huber penalty");
    cmd.option("glasso-lambda", glasso_lambda, "Graphical lasso penalty");
    cmd.option("alpha", alpha, "Miscoverage level for the coverage scenario");
    cmd.option("sim-spec", sim_spec, "SimSpec JSON for the custom scenario");
  }

  ExperimentSpec spec() const {
    ExperimentSpec s;
    try {
      s.scenario = scenario_from_string(scenario);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    s.trials = trials;
    s.seed = seed;
    for (long v : n) s.n_grid.push_back(v);
    if (p) s.p = *p;
    s.k = k;
    s.error_scale = error_scale;
    s.C = C;
    s.delta = delta;
    s.b = b;
    s.M = M;
    s.lambda = lambda;
    s.glasso_lambda = glasso_lambda;
    s.alpha = alpha;
    if (s.scenario == Scenario::custom) {
      if (sim_spec.empty()) throw UsageError("the custom scenario needs --sim-spec");
      s.custom = sim_spec_from_json(read_json(sim_spec));
    }
    try {
      (void)s.resolved();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return s;
  }
};

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  return spec.scenario == Scenario::coverage ? run_coverage(spec) : run_consistency(spec);
}

void write_experiment(const ExperimentReport& report, const fs::path& dir) {
  fs::create_directories(dir);
  write_report_csv(report, report_csv_path(dir, report.spec));
  write_report_json(report, report_json_path(dir, report.spec));
}

void print_summary(const ExperimentReport& report, std::ostream& out) {
  for (const auto& s : report.summary) {
    out << "n=" << s.n << ' ' << s.estimator << ": mean_l2 " << s.mean_l2;
    if (s.coverage >= 0.0) out << ", coverage " << s.coverage;
    if (s.failures > 0) out << ", failures " << s.failures;
    out << '\n';
  }
}

fs::path experiment_manifest(const fs::path& dir, const std::string& stem) { return dir / (stem + "_manifest.json"); }

struct SimulateCmd {
  Command cmd;
  ExperimentArgs args;

  void add(CLI::App& root) {
    cmd.app = root.add_subcommand("simulate", "Run a simulation study and write CSV and JSON reports");
    cmd.name = "simulate";
    args.add(cmd, true);
    cmd.add_meta_options();
  }

  int run(std::ostream& out, std::ostream&) {
    if (args.scenario.empty()) throw UsageError("--scenario is required");
    const ExperimentSpec spec = args.spec();
    const ExperimentReport report = run_experiment(spec);
    write_experiment(report, args.out_dir);
    write_manifest(cmd, experiment_manifest(args.out_dir, args.scenario + "_seed" + std::to_string(args.seed)));
    print_summary(report, out);
    return ok;
  }
};

struct CheckCmd {
  Command cmd;
  ExperimentArgs args;
  int mc_trials = 1000;
  double quad_tol = 1e-9;

  void add(CLI::App& root) {
    cmd.app = root.add_subcommand(
        "check", "Efficiency identity, median-of-means/MAD Monte Carlo and optional scenario properties");
    cmd.name = "check";
    args.add(cmd, false);
    cmd.option("mc-trials", mc_trials, "Monte Carlo trials for the median-of-means and MAD checks");
    cmd.option("quad-tol", quad_tol, "Quadrature tolerance");
    cmd.add_meta_options();
  }

  int run(std::ostream& out, std::ostream& err) {
    if (mc_trials < 100) throw UsageError("mc-trials must be at least 100");
    std::optional<ExperimentSpec> spec;
    if (!args.scenario.empty()) spec = args.spec();

    std::vector<std::string> failures;
    Json report;
    report["schema"] = 1;

    const EfficiencyTerms t3 = efficiency_identity_check(3, quad_tol);
    const double rel = std::abs(t3.v1 - t3.v2) / t3.v1;
    out << "t3: v1 = " << t3.v1 << ", v2 = " << t3.v2 << ", |v1 - v2|/v1 = " << rel << '\n';
    if (rel > 1e-6 || std::abs(t3.v1 - 1.5) > 1e-6) failures.push_back("t3 efficiency identity");
    const EfficiencyTerms gauss = efficiency_identity_check_gaussian(quad_tol);
    out << "gaussian: v1 = " << gauss.v1 << ", v2 = " << gauss.v2 << '\n';
    if (std::abs(gauss.v1 - gauss.v2) / gauss.v1 > 1e-6) failures.push_back("gaussian efficiency identity");
    report["efficiency"] = {{"t3", to_json_value(t3)}, {"gaussian", to_json_value(gauss)}};

    const MomMadReport mm = run_mom_mad_checks(mc_trials, args.seed);
    out << "median-of-means failure rate " << mm.mom_failure_rate << " (bound " << mm.mom_bound << ")\n";
    out << "MAD(X) mean " << mm.mad_x_mean << ", MAD(X+Y) mean " << mm.mad_xy_mean << '\n';
    out << "sigma_max >= sigma* in " << mm.sigma_max_validity << " of runs\n";
    if (!mm.mom_ok) failures.push_back("median-of-means deviation bound");
    if (!mm.mad_ok) failures.push_back("MAD dominance");
    if (!mm.mad_degenerate_exact) failures.push_back("MAD with Y = 0");
    if (!mm.sigma_ok) failures.push_back("sigma_max validity");
    report["mom_mad"] = to_json_value(mm);

    if (spec) {
      const ExperimentReport rep = run_experiment(*spec);
      write_experiment(rep, args.out_dir);
      print_summary(rep, out);
      check_scenario(rep, failures, out);
    }

    report["failures"] = failures;
    fs::create_directories(args.out_dir);
    write_json(report, fs::path(args.out_dir) / ("check_seed" + std::to_string(args.seed) + ".json"));
    write_manifest(cmd, experiment_manifest(args.out_dir, "check_seed" + std::to_string(args.seed)));
    if (!failures.empty()) {
      for (const auto& f : failures) err << "FAILED: " << f << '\n';
      return property_failed;
    }
    out << "all checks passed\n";
    return ok;
  }

  static void check_scenario(const ExperimentReport& rep, std::vector<std::string>& failures, std::ostream& out) {
    if (rep.spec.scenario == Scenario::coverage) {
      for (Index n : rep.spec.n_grid) {
        const SummaryRow* t3 = rep.find(n, "one_step_t3");
        const SummaryRow* gauss = rep.find(n, "one_step_gaussian");
        const double nominal = 1.0 - rep.spec.alpha;
        if (!t3 || std::abs(t3->coverage - nominal) > 0.05) failures.push_back("t3 coverage near nominal");
        if (!t3 || !gauss || gauss->coverage < t3->coverage - 0.05) failures.push_back("gaussian coverage");
      }
      return;
    }
    if (rep.spec.n_grid.size() < 2) return;
    double prev = std::numeric_limits<double>::infinity();
    for (Index n : rep.spec.n_grid) {
      const SummaryRow* s = rep.find(n, "lepski");
      if (!s || !(s->mean_l2 < prev)) {
        failures.push_back("mean l2 error strictly decreasing in n");
        break;
      }
      prev = s->mean_l2;
    }
    const double slope = error_rate_slope(rep, "lepski");
    out << "log-log slope of mean l2 error: " << slope << '\n';
    if (slope < -0.8 || slope > -0.2) failures.push_back("error-rate slope in [-0.8, -0.2]");
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive-scale robust sparse regression"};
  app.name("adahuber");
  app.require_subcommand(1);
  app.set_version_flag("--version", ADAHUBER_VERSION);

  FitCmd fit;
  AdaptCmd adapt;
  DebiasCmd debias;
  CiCmd ci;
  SimulateCmd simulate;
  CheckCmd check;
  fit.add(app);
  adapt.add(app);
  debias.add(app);
  ci.add(app);
  simulate.add(app);
  check.add(app);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o;
    std::ostringstream x;
    const int code = app.exit(e, o, x);
    out << o.str();
    err << x.str();
    return code == 0 ? ok : error;
  }

  try {
    auto dispatch = [&](auto& sub) -> std::optional<int> {
      if (!sub.cmd.app->parsed()) return std::nullopt;
      apply_config(sub.cmd);
      return sub.run(out, err);
    };
    for (auto r : {dispatch(fit), dispatch(adapt), dispatch(debias), dispatch(ci), dispatch(simulate),
                   dispatch(check)}) {
      if (r) return *r;
    }
    return error;
  } catch (const GlassoNotConverged& e) {
    err << "error: " << e.what() << '\n';
    return not_converged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return error;
  }
}

}  // namespace adahuber::cli
