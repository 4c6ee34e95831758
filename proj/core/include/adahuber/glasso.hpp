#pragma once

#include <filesystem>
#include <vector>

#include "adahuber/dataset.hpp"

namespace adahuber {

/// Uncentred sample second-moment matrix X^T X / n.
struct CovMatrix {
  MatrixXd sigma_hat;
};

CovMatrix sample_cov(const Dataset& data);

struct PrecisionEstimate {
  MatrixXd theta;
  double lambda = 0.0;
  double kkt_residual = 0.0;
  /// Completed sweeps over all columns.
  int iterations = 0;
  bool converged = false;
  /// Objective at the start point and after every sweep.
  std::vector<double> objective_trace;
};

/// 0.5 sqrt(log p / n).
double default_glasso_lambda(Index n, Index p);

/// tr(Theta^T Sigma) - log det Theta + lambda sum_{i != j} |Theta_ij|.
/// Throws NumericalError when theta is not positive definite.
double glasso_objective(const CovMatrix& cov, const MatrixXd& theta, double lambda);

/// Stationarity violation of the program above: for off-diagonal entries,
/// |S_ij - W_ij + lambda sign(Theta_ij)| when Theta_ij != 0 and
/// max(|S_ij - W_ij| - lambda, 0) otherwise; |S_ii - W_ii| on the diagonal,
/// with W = Theta^{-1}. Throws NumericalError when theta is singular.
double kkt_residual(const CovMatrix& cov, const MatrixXd& theta, double lambda);

/// Graphical lasso with unpenalised diagonal, solved by block coordinate
/// descent on the precision matrix. Each column update minimises the
/// objective exactly over (theta_12, theta_22) through a coordinate-descent
/// lasso on the remaining p-1 coordinates, so every iterate is positive
/// definite and the objective never increases.
///
/// Requires a positive diagonal; lambda = 0 additionally requires cov to be
/// positive definite (std::invalid_argument otherwise). Running out of
/// sweeps is reported through `converged = false`.
PrecisionEstimate graphical_lasso(const CovMatrix& cov, double lambda, double tol = 1e-8,
                                  int max_iter = 500);

/// Dense p x p matrix, 17 significant digits, no header.
void write_matrix_csv(const MatrixXd& m, const std::filesystem::path& path);

/// Nonzero entries of the upper triangle as `i,j,value` rows with 1-based indices.
void write_sparsity_triplets(const MatrixXd& m, const std::filesystem::path& path);

}  // namespace adahuber
