#pragma once

#include <optional>
#include <vector>

#include "adahuber/dataset.hpp"

namespace adahuber {

/// Median-of-means settings. K defaults to floor(8 log(e^{1/8} / delta) ^ n/2).
struct MoMConfig {
  double delta = 0.05;
  std::optional<Index> K;

  /// Number of blocks used for a sample of size n (at least 1).
  Index blocks(Index n) const;
};

/// Median of the K block means of consecutive blocks of floor(n/K) values,
/// remainder discarded. Throws std::invalid_argument when n < K.
double median_of_means(const VectorXd& values, Index K);
double median_of_means(const VectorXd& values, const MoMConfig& cfg);

/// Median with even counts resolved by averaging the central pair.
double median(std::vector<double> values);

/// median(|v - median(v)|).
double mad(const VectorXd& values);

/// Geometric scale grid sigma_j = sigma_min 2^j for j in {1, ..., M}, so that
/// sigma_M = sigma_max. sigma_min itself is a bracket endpoint, not a grid point.
struct ScaleGrid {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  int M = 0;
  std::vector<double> sigmas;
  std::vector<int> indices;

  static ScaleGrid from_sigma_max(double sigma_max, int M);
};

/// M = ceil(2 n^{1/3}).
int default_grid_depth(Index n);

/// sigma_max = sqrt(2 * MoM(y^2)), sigma_min = sigma_max / 2^M.
/// Throws std::invalid_argument when the MoM estimate is not positive.
ScaleGrid sigma_bounds(const VectorXd& y, const MoMConfig& cfg, int M);

/// Same grid with sigma_max = MAD(y), usable when second moments may not exist.
ScaleGrid sigma_bounds_mad(const VectorXd& y, int M);

}  // namespace adahuber
