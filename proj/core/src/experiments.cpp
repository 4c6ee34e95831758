#include "adahuber/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "adahuber/glasso.hpp"
#include "adahuber/inference.hpp"
#include "adahuber/json_io.hpp"
#include "adahuber/lepski.hpp"
#include "adahuber/scale_bounds.hpp"

namespace adahuber {

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::fig1: return "fig1";
    case Scenario::fig2: return "fig2";
    case Scenario::coverage: return "coverage";
    case Scenario::custom: return "custom";
  }
  return "unknown";
}

Scenario scenario_from_string(const std::string& name) {
  if (name == "fig1") return Scenario::fig1;
  if (name == "fig2") return Scenario::fig2;
  if (name == "coverage") return Scenario::coverage;
  if (name == "custom") return Scenario::custom;
  throw std::invalid_argument("unknown scenario '" + name + "' (expected fig1, fig2, coverage or custom)");
}

ExperimentSpec ExperimentSpec::resolved() const {
  ExperimentSpec r = *this;
  switch (scenario) {
    case Scenario::fig1:
      if (!r.p) r.p = 200;
      if (r.n_grid.empty()) r.n_grid = {100, 200, 400, 800};
      if (!r.trials) r.trials = 10;
      break;
    case Scenario::fig2:
      if (!r.p) r.p = 100;
      if (r.n_grid.empty()) r.n_grid = {100, 200, 400, 800};
      if (!r.trials) r.trials = 10;
      break;
    case Scenario::coverage:
      if (!r.p) r.p = 10;
      if (r.n_grid.empty()) r.n_grid = {100};
      if (!r.trials) r.trials = 200;
      break;
    case Scenario::custom:
      if (!r.custom) throw std::invalid_argument("custom scenario needs a SimSpec");
      r.p = r.custom->p;
      r.k = r.custom->k;
      r.beta_values = r.custom->beta_values;
      if (r.n_grid.empty()) r.n_grid = {r.custom->n};
      if (!r.trials) r.trials = 10;
      break;
  }
  if (!r.beta_values) r.beta_values = VectorXd::Ones(r.k);
  if (*r.trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (r.k < 1 || r.k > *r.p) throw std::invalid_argument("k must satisfy 1 <= k <= p");
  if (r.beta_values->size() != r.k) throw std::invalid_argument("beta_values must have k entries");
  for (Index n : r.n_grid) {
    if (n < 2) throw std::invalid_argument("every n in n_grid must be at least 2");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  return r;
}

SimSpec ExperimentSpec::sim_spec(Index n, int trial) const {
  SimSpec sim;
  if (scenario == Scenario::custom) {
    sim = *custom;
  } else {
    sim.p = *p;
    sim.k = k;
    sim.beta_values = *beta_values;
    sim.error_dist = StudentTErrors{3, error_scale};
    if (scenario == Scenario::fig1) {
      sim.covariate_dist = GaussianCovariates{};
    } else {
      sim.covariate_dist = StudentTCovariates{3};
    }
  }
  sim.n = n;
  sim.seed = derive_seed(derive_seed(seed, static_cast<std::uint64_t>(n)),
                         static_cast<std::uint64_t>(trial));
  return sim;
}

const SummaryRow* ExperimentReport::find(Index n, const std::string& estimator) const {
  for (const auto& s : summary) {
    if (s.n == n && s.estimator == estimator) return &s;
  }
  return nullptr;
}

namespace {

bool is_t3(const ErrorDist& dist) {
  const auto* t = std::get_if<StudentTErrors>(&dist);
  return t && t->df == 3;
}

ReportRow make_row(const ExperimentSpec& spec, Index n, int trial, std::string estimator) {
  ReportRow row;
  row.scenario = to_string(spec.scenario);
  row.n = n;
  row.trial = trial;
  row.estimator = std::move(estimator);
  return row;
}

void fill_errors(ReportRow& row, const VectorXd& estimate, const VectorXd& truth, Index k) {
  row.l2_error = (estimate - truth).norm();
  row.l1_error = (estimate - truth).lpNorm<1>();
  row.coefficients.assign(estimate.data(), estimate.data() + k);
}

void mark_failed(ReportRow& row, const std::string& why) {
  row.status = why;
  row.l2_error = std::numeric_limits<double>::quiet_NaN();
  row.l1_error = std::numeric_limits<double>::quiet_NaN();
  row.coefficients.clear();
  row.covered.clear();
}

std::vector<ReportRow> run_trial(const ExperimentSpec& spec, Index n, int trial, bool intervals) {
  const SimSpec sim = spec.sim_spec(n, trial);
  const Dataset data = generate(sim);
  const VectorXd& truth = data.truth()->beta_star;
  const Index k = spec.k;

  LepskiConfig lep;
  lep.C = spec.C;
  lep.k = k;
  lep.M = spec.M;
  lep.lambda = spec.lambda;
  lep.huber.weights = WeightSpec::identity(spec.b);
  lep.fallback = true;
  MoMConfig mom;
  mom.delta = spec.delta;

  std::vector<ReportRow> rows;
  ReportRow lep_row = make_row(spec, n, trial, "lepski");
  std::vector<std::string> step_names =
      intervals ? std::vector<std::string>{"one_step_t3", "one_step_gaussian"}
                : std::vector<std::string>{"one_step"};

  LepskiResult fit;
  try {
    fit = adaptive_fit(data, lep, mom);
    lep_row.j_star = *fit.j_star;
    fill_errors(lep_row, fit.beta, truth, k);
    if (fit.used_fallback) lep_row.status = "fallback";
  } catch (const std::exception& e) {
    mark_failed(lep_row, std::string("lepski: ") + e.what());
    rows.push_back(lep_row);
    for (const auto& name : step_names) {
      ReportRow r = make_row(spec, n, trial, name);
      mark_failed(r, "lepski failed");
      rows.push_back(r);
    }
    return rows;
  }
  rows.push_back(lep_row);

  const double glasso_lambda =
      spec.glasso_lambda ? *spec.glasso_lambda : default_glasso_lambda(data.n(), data.p());
  PrecisionEstimate theta;
  std::string theta_status = "ok";
  try {
    theta = graphical_lasso(sample_cov(data), glasso_lambda);
    if (!theta.converged) theta_status = "glasso_not_converged";
  } catch (const std::exception& e) {
    for (const auto& name : step_names) {
      ReportRow r = make_row(spec, n, trial, name);
      r.j_star = lep_row.j_star;
      mark_failed(r, std::string("glasso: ") + e.what());
      rows.push_back(r);
    }
    return rows;
  }

  for (const auto& name : step_names) {
    ReportRow r = make_row(spec, n, trial, name);
    r.j_star = lep_row.j_star;
    try {
      const bool use_t3 = name == "one_step_t3" || (name == "one_step" && is_t3(sim.error_dist));
      const ScoreFunction score = use_t3 ? t3_score() : gaussian_score();
      const OneStepEstimate step = one_step(data, fit.beta, theta.theta, score);
      fill_errors(r, step.b_psi, truth, k);
      r.status = theta_status;
      if (intervals) {
        for (Index j = 0; j < k; ++j) {
          const ConfidenceRegion region = confidence_region(data, step, theta.theta, {j}, spec.alpha);
          const auto [lo, hi] = region.intervals.front();
          r.covered.push_back(lo <= truth(j) && truth(j) <= hi);
        }
      }
    } catch (const std::exception& e) {
      mark_failed(r, std::string("one_step: ") + e.what());
    }
    rows.push_back(r);
  }
  return rows;
}

void summarize(ExperimentReport& report) {
  std::map<std::pair<Index, std::string>, std::vector<const ReportRow*>> groups;
  std::vector<std::pair<Index, std::string>> order;
  for (const auto& row : report.rows) {
    const auto key = std::make_pair(row.n, row.estimator);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&row);
  }
  const Index k = report.spec.k;
  for (const auto& key : order) {
    const auto& members = groups[key];
    SummaryRow s;
    s.n = key.first;
    s.estimator = key.second;
    s.trials = static_cast<int>(members.size());
    std::vector<const ReportRow*> good;
    for (const auto* row : members) {
      if (std::isfinite(row->l2_error)) {
        good.push_back(row);
      } else {
        ++s.failures;
      }
    }
    s.coefficient_variance.assign(static_cast<std::size_t>(k), std::numeric_limits<double>::quiet_NaN());
    if (!good.empty()) {
      const double count = static_cast<double>(good.size());
      for (const auto* row : good) {
        s.mean_l2 += row->l2_error / count;
        s.mean_l1 += row->l1_error / count;
      }
      if (good.size() > 1) {
        for (Index j = 0; j < k; ++j) {
          double mean = 0.0;
          for (const auto* row : good) mean += row->coefficients[static_cast<std::size_t>(j)] / count;
          double ss = 0.0;
          for (const auto* row : good) {
            const double d = row->coefficients[static_cast<std::size_t>(j)] - mean;
            ss += d * d;
          }
          s.coefficient_variance[static_cast<std::size_t>(j)] = ss / (count - 1.0);
        }
      }
    } else {
      s.mean_l2 = s.mean_l1 = std::numeric_limits<double>::quiet_NaN();
    }
    int covered = 0;
    int intervals = 0;
    for (const auto* row : members) {
      for (bool c : row->covered) {
        covered += c ? 1 : 0;
        ++intervals;
      }
    }
    if (intervals > 0) {
      // Failed trials count as non-covering so the rate stays over trials x k.
      const int expected = s.trials * static_cast<int>(k);
      s.coverage = static_cast<double>(covered) / static_cast<double>(std::max(expected, intervals));
    }
    report.summary.push_back(std::move(s));
  }
}

ExperimentReport run_sweep(const ExperimentSpec& spec, bool intervals) {
  ExperimentReport report;
  report.spec = spec.resolved();
  for (Index n : report.spec.n_grid) {
    for (int trial = 0; trial < *report.spec.trials; ++trial) {
      auto rows = run_trial(report.spec, n, trial, intervals);
      report.rows.insert(report.rows.end(), rows.begin(), rows.end());
    }
  }
  summarize(report);
  return report;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ExperimentReport run_consistency(const ExperimentSpec& spec) {
  if (spec.scenario == Scenario::coverage) {
    throw std::invalid_argument("run_consistency expects fig1, fig2 or custom");
  }
  return run_sweep(spec, false);
}

ExperimentReport run_coverage(const ExperimentSpec& spec) {
  if (spec.scenario != Scenario::coverage) throw std::invalid_argument("run_coverage expects the coverage scenario");
  return run_sweep(spec, true);
}

std::filesystem::path report_csv_path(const std::filesystem::path& dir, const ExperimentSpec& spec) {
  return dir / (to_string(spec.scenario) + "_seed" + std::to_string(spec.seed) + ".csv");
}

std::filesystem::path report_json_path(const std::filesystem::path& dir, const ExperimentSpec& spec) {
  return dir / (to_string(spec.scenario) + "_seed" + std::to_string(spec.seed) + "_summary.json");
}

void write_report_csv(const ExperimentReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  const Index k = report.spec.k;
  out << "scenario,n,trial,estimator,status,j_star,l2_error,l1_error";
  for (Index j = 1; j <= k; ++j) out << ",coef_" << j;
  for (Index j = 1; j <= k; ++j) out << ",covered_" << j;
  out << '\n';
  for (const auto& row : report.rows) {
    out << row.scenario << ',' << row.n << ',' << row.trial << ',' << row.estimator << ",\""
        << row.status << "\"," << row.j_star << ',' << format_real(row.l2_error) << ','
        << format_real(row.l1_error);
    for (Index j = 0; j < k; ++j) {
      out << ',';
      if (static_cast<std::size_t>(j) < row.coefficients.size()) {
        out << format_real(row.coefficients[static_cast<std::size_t>(j)]);
      }
    }
    for (Index j = 0; j < k; ++j) {
      out << ',';
      if (static_cast<std::size_t>(j) < row.covered.size()) out << (row.covered[static_cast<std::size_t>(j)] ? 1 : 0);
    }
    out << '\n';
  }
}

void write_report_json(const ExperimentReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["spec"] = to_json_value(report.spec);
  auto& rows = j["summary"] = nlohmann::ordered_json::array();
  for (const auto& s : report.summary) {
    nlohmann::ordered_json r;
    r["n"] = s.n;
    r["estimator"] = s.estimator;
    r["trials"] = s.trials;
    r["failures"] = s.failures;
    r["mean_l2"] = finite_or_null(s.mean_l2);
    r["mean_l1"] = finite_or_null(s.mean_l1);
    auto& var = r["coefficient_variance"] = nlohmann::ordered_json::array();
    for (double v : s.coefficient_variance) var.push_back(finite_or_null(v));
    if (s.coverage >= 0.0) r["coverage"] = s.coverage;
    rows.push_back(std::move(r));
  }
  out << j.dump(2) << '\n';
}

double error_rate_slope(const ExperimentReport& report, const std::string& estimator) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& s : report.summary) {
    if (s.estimator != estimator || !std::isfinite(s.mean_l2) || s.mean_l2 <= 0.0) continue;
    xs.push_back(std::log(static_cast<double>(s.n)));
    ys.push_back(std::log(s.mean_l2));
  }
  if (xs.size() < 2) throw std::invalid_argument("slope needs at least two sample sizes");
  const double count = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / count;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / count;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

MomMadReport run_mom_mad_checks(int trials, std::uint64_t seed) {
  if (trials < 100) throw std::invalid_argument("MoM/MAD checks need at least 100 trials");
  MomMadReport rep;
  rep.trials = trials;

  // Deviation bound with epsilon = 1: (12 v)^{1/2} (16 log(e^{1/8}/delta) / n)^{1/2}, v = Var(t3) = 3.
  const double v = 3.0;
  rep.mom_bound = std::sqrt(12.0 * v) *
                  std::sqrt(16.0 * std::log(std::exp(0.125) / rep.delta) / static_cast<double>(rep.mom_n));
  MoMConfig mom;
  mom.delta = rep.delta;
  int failures = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    VectorXd sample(rep.mom_n);
    for (Index i = 0; i < rep.mom_n; ++i) sample(i) = student_t_sample(3, rng);
    if (std::abs(median_of_means(sample, mom)) > rep.mom_bound) ++failures;
  }
  rep.mom_failure_rate = static_cast<double>(failures) / trials;
  rep.mom_ok = rep.mom_failure_rate <= rep.delta + 0.02;

  std::vector<double> diffs;
  bool exact = true;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed ^ 0xA5A5A5A5ULL, static_cast<std::uint64_t>(t)));
    VectorXd x(rep.mad_n);
    VectorXd y(rep.mad_n);
    for (Index i = 0; i < rep.mad_n; ++i) x(i) = rng.normal();
    for (Index i = 0; i < rep.mad_n; ++i) y(i) = student_t_sample(3, rng);
    const double mad_x = mad(x);
    const double mad_xy = mad(x + y);
    rep.mad_x_mean += mad_x / trials;
    rep.mad_xy_mean += mad_xy / trials;
    diffs.push_back(mad_x - mad_xy);
    if (mad(x + VectorXd::Zero(rep.mad_n)) != mad_x) exact = false;
  }
  const double mean_diff = std::accumulate(diffs.begin(), diffs.end(), 0.0) / trials;
  double ss = 0.0;
  for (double d : diffs) ss += (d - mean_diff) * (d - mean_diff);
  rep.mad_diff_se = std::sqrt(ss / (trials - 1.0)) / std::sqrt(static_cast<double>(trials));
  rep.mad_ok = mean_diff <= 3.0 * rep.mad_diff_se;
  rep.mad_degenerate_exact = exact;

  int valid = 0;
  for (int t = 0; t < rep.sigma_runs; ++t) {
    SimSpec sim;
    sim.n = 100;
    sim.p = 10;
    sim.k = 4;
    sim.beta_values = VectorXd::Ones(4);
    sim.error_dist = StudentTErrors{3, 0.01};
    sim.seed = derive_seed(seed ^ 0x5A5A5A5AULL, static_cast<std::uint64_t>(t));
    const Dataset data = generate(sim);
    const ScaleGrid grid = sigma_bounds(data.y(), mom, default_grid_depth(data.n()));
    if (grid.sigma_max >= data.truth()->sigma_star) ++valid;
  }
  rep.sigma_max_validity = static_cast<double>(valid) / rep.sigma_runs;
  rep.sigma_ok = rep.sigma_max_validity >= 0.95;
  return rep;
}

}  // namespace adahuber
