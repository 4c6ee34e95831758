#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "adahuber/dataset.hpp"

namespace adahuber {

enum class Scenario { fig1, fig2, coverage, custom };

std::string to_string(Scenario s);
/// Throws std::invalid_argument for unknown names.
Scenario scenario_from_string(const std::string& name);

/// Simulation study settings. Unset fields take the scenario defaults:
///   fig1     Gaussian X, t3 errors scaled by 0.01, p = 200, n in {100, 200, 400, 800}
///   fig2     t3 X and t3 errors scaled by 0.01,   p = 100, n in {100, 200, 400, 800}
///   coverage t3 X and t3 errors scaled by 0.01,   p = 10,  n = 100, 200 trials
///   custom   the supplied SimSpec (its n is replaced by each n_grid entry)
struct ExperimentSpec {
  Scenario scenario = Scenario::fig1;
  std::vector<Index> n_grid;
  std::optional<Index> p;
  Index k = 4;
  std::optional<VectorXd> beta_values;
  std::optional<int> trials;
  std::uint64_t seed = 1;
  double error_scale = 0.01;
  // Estimation settings.
  double C = 20.0;
  double delta = 0.05;
  double b = 1.0;
  std::optional<int> M;
  std::optional<double> lambda;
  std::optional<double> glasso_lambda;
  double alpha = 0.1;
  std::optional<SimSpec> custom;

  /// Scenario defaults filled in; throws std::invalid_argument when inconsistent.
  ExperimentSpec resolved() const;
  /// Simulation settings for one (n, trial) cell of a resolved spec.
  SimSpec sim_spec(Index n, int trial) const;
};

struct ReportRow {
  std::string scenario;
  Index n = 0;
  int trial = 0;
  /// lepski, one_step, one_step_t3 or one_step_gaussian
  std::string estimator;
  /// "ok" or a short failure description
  std::string status = "ok";
  int j_star = 0;
  double l2_error = 0.0;
  double l1_error = 0.0;
  /// Estimates of the k nonzero coordinates.
  std::vector<double> coefficients;
  /// One entry per nonzero coordinate for interval estimators, empty otherwise.
  std::vector<bool> covered;
};

struct SummaryRow {
  Index n = 0;
  std::string estimator;
  int trials = 0;
  int failures = 0;
  double mean_l2 = 0.0;
  double mean_l1 = 0.0;
  /// Empirical variance (denominator trials - 1) of each nonzero coordinate.
  std::vector<double> coefficient_variance;
  /// Covered count over (trials x k) intervals; negative when not applicable.
  double coverage = -1.0;
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::vector<ReportRow> rows;
  std::vector<SummaryRow> summary;

  const SummaryRow* find(Index n, const std::string& estimator) const;
};

/// generate -> adaptive_fit -> glasso -> one_step per (n, trial). Failures are
/// recorded on the affected rows and never abort the sweep.
ExperimentReport run_consistency(const ExperimentSpec& spec);

/// As run_consistency, plus confidence intervals for every nonzero coordinate
/// under both the t3 and the gaussian score.
ExperimentReport run_coverage(const ExperimentSpec& spec);

/// Report files are `<scenario>_seed<seed>.csv` and `<scenario>_seed<seed>_summary.json`.
std::filesystem::path report_csv_path(const std::filesystem::path& dir, const ExperimentSpec& spec);
std::filesystem::path report_json_path(const std::filesystem::path& dir, const ExperimentSpec& spec);
void write_report_csv(const ExperimentReport& report, const std::filesystem::path& path);
void write_report_json(const ExperimentReport& report, const std::filesystem::path& path);

/// Least-squares slope of log(mean l2 error) against log n for one estimator.
double error_rate_slope(const ExperimentReport& report, const std::string& estimator);

struct MomMadReport {
  int trials = 0;
  // Median-of-means deviation bound on t3 samples.
  Index mom_n = 200;
  double delta = 0.05;
  double mom_bound = 0.0;
  double mom_failure_rate = 0.0;
  bool mom_ok = false;
  // MAD(X) <= MAD(X + Y), X ~ N(0, 1), Y ~ t3.
  Index mad_n = 1000;
  double mad_x_mean = 0.0;
  double mad_xy_mean = 0.0;
  double mad_diff_se = 0.0;
  bool mad_ok = false;
  bool mad_degenerate_exact = false;
  // sigma_max >= sigma* on simulated data.
  int sigma_runs = 500;
  double sigma_max_validity = 0.0;
  bool sigma_ok = false;

  bool all_ok() const { return mom_ok && mad_ok && mad_degenerate_exact && sigma_ok; }
};

/// Monte Carlo checks of the median-of-means bound, MAD dominance and
/// sigma_max validity. Requires trials >= 100.
MomMadReport run_mom_mad_checks(int trials, std::uint64_t seed);

}  // namespace adahuber
