#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "adahuber/rng.hpp"

namespace adahuber {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Known parameters of a simulated dataset.
struct GroundTruth {
  VectorXd beta_star;
  /// Standard deviation of the additive errors. Zero for noiseless simulations.
  double sigma_star = 0.0;
};

/// Observations (x_i, y_i), i = 1..n, of the linear model y = X beta* + eps.
///
/// Validated on construction (n, p >= 1, matching sizes, finite entries) and
/// immutable afterwards.
class Dataset {
 public:
  Dataset(MatrixXd X, VectorXd y, std::optional<GroundTruth> truth = std::nullopt);

  const MatrixXd& X() const { return X_; }
  const VectorXd& y() const { return y_; }
  const std::optional<GroundTruth>& truth() const { return truth_; }
  Index n() const { return X_.rows(); }
  Index p() const { return X_.cols(); }

 private:
  MatrixXd X_;
  VectorXd y_;
  std::optional<GroundTruth> truth_;
};

// ---------------------------------------------------------------------------
// CSV

/// Response column, either by header name or by zero-based position.
using ColumnRef = std::variant<std::string, std::size_t>;

/// Reads a comma-separated numeric table. A header row is assumed when any
/// cell of the first row fails to parse as a number. X holds every column
/// except `y_column`, in file order.
///
/// Throws std::runtime_error on I/O failure and ParseError on malformed
/// content (the message names the file line and column).
Dataset load_csv(const std::filesystem::path& path, const ColumnRef& y_column);

/// Writes header `x1,...,xp,y` followed by one row per observation, with
/// 17 significant digits so that values round-trip exactly.
void write_csv(const Dataset& data, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Simulation

struct GaussianCovariates {};
struct StudentTCovariates {
  int df = 3;
};
using CovariateDist = std::variant<GaussianCovariates, StudentTCovariates>;

struct GaussianErrors {
  double sd = 1.0;
};
struct StudentTErrors {
  int df = 3;
  double scale = 1.0;
};
using ErrorDist = std::variant<GaussianErrors, StudentTErrors>;

struct SimSpec {
  Index n = 100;
  Index p = 10;
  Index k = 4;
  /// Nonzero coefficients, placed on coordinates 0..k-1.
  VectorXd beta_values = VectorXd::Ones(4);
  CovariateDist covariate_dist = GaussianCovariates{};
  ErrorDist error_dist = GaussianErrors{};
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
  VectorXd beta_star() const;
};

/// Standard deviation of an error distribution: sd, or scale * sqrt(df / (df - 2)).
double error_sd(const ErrorDist& dist);

/// One t_df draw as Z / sqrt(chi2_df / df), chi2_df a sum of df squared normals.
double student_t_sample(int df, Rng& rng);

/// A simulated dataset together with the exact error draws used to build y.
struct Simulation {
  Dataset data;
  VectorXd errors;
};

/// Draws X row by row, then the n errors, from one Rng seeded with spec.seed,
/// and sets y_i = x_i^T beta* + eps_i.
Simulation simulate(const SimSpec& spec);
Dataset generate(const SimSpec& spec);

}  // namespace adahuber
