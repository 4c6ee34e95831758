#pragma once

#include <optional>
#include <vector>

#include "adahuber/huber.hpp"
#include "adahuber/scale_bounds.hpp"

namespace adahuber {

struct LepskiConfig {
  /// Comparison constant in the thresholds 6 C sigma_i sqrt(k log p / n)
  /// and 24 C sigma_i k sqrt(log p / n).
  double C = 20.0;
  /// Sparsity level entering the thresholds.
  Index k = 1;
  /// Grid depth; ceil(2 n^{1/3}) when unset.
  std::optional<int> M;
  /// Solver settings shared by every grid fit. `tau` is overwritten by
  /// tau_factor * sigma_j.
  HuberConfig huber;
  /// Penalty; 0.005 b' sqrt(log p / n) when unset (huber.lambda is ignored).
  std::optional<double> lambda;
  double tau_factor = 3.0;
  /// When no index qualifies, return the largest grid index instead of throwing.
  bool fallback = false;

  void validate() const;
};

/// One grid point offered to the selection rule.
struct Candidate {
  int index = 0;
  double sigma = 0.0;
  VectorXd beta;
  /// Non-converged fits are still compared against but cannot be selected.
  bool admissible = true;
};

struct Comparison {
  int j = 0;
  int i = 0;
  double l2 = 0.0;
  double l1 = 0.0;
  double l2_threshold = 0.0;
  double l1_threshold = 0.0;
  bool pass = false;
};

struct GridFit {
  int index = 0;
  double sigma = 0.0;
  double tau = 0.0;
  Estimate estimate;
};

struct LepskiResult {
  std::optional<int> j_star;
  VectorXd beta;
  bool used_fallback = false;
  ScaleGrid grid;
  double lambda = 0.0;
  std::vector<GridFit> per_grid;
  /// Every pair (j, i) with i > j, in lexicographic order.
  std::vector<Comparison> comparison_log;
};

/// Threshold pair (l2, l1) for grid scale sigma_i.
std::pair<double, double> lepski_thresholds(double sigma_i, double C, Index k, Index n, Index p);

/// j* = min{ j : for all i > j, ||b_i - b_j||_2 <= 6 C s_i sqrt(k log p / n) and
///                              ||b_i - b_j||_1 <= 24 C s_i k sqrt(log p / n) }
/// over admissible candidates (ordered by increasing sigma). Returns an empty
/// j_star when nothing qualifies; `fallback` is not applied here.
LepskiResult select(const std::vector<Candidate>& candidates, double C, Index k, Index n, Index p);

/// sigma_bounds -> fit_huber at tau = 3 sigma_j for each grid point -> select.
///
/// Fits run from the largest sigma downwards, each warm-started at the
/// previous solution. Throws SelectionError when no index qualifies and
/// cfg.fallback is false.
LepskiResult adaptive_fit(const Dataset& data, const LepskiConfig& cfg, const MoMConfig& mom);

/// Fits and selection on an explicit grid.
LepskiResult adaptive_fit(const Dataset& data, const LepskiConfig& cfg, const ScaleGrid& grid);

}  // namespace adahuber
