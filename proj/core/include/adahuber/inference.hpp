#pragma once

#include <functional>
#include <vector>

#include "adahuber/glasso.hpp"
#include "adahuber/score.hpp"

namespace adahuber {

struct OneStepEstimate {
  VectorXd b_psi;
  VectorXd base_beta;
  ScoreDiagnostics diagnostics;
};

/// b = beta + (Theta / A-hat) (1/n) sum psi((y_i - x_i^T beta) / sigma_hat) x_i
/// with sigma_hat = residual_scale(data, beta).
///
/// Throws NumericalError when A-hat vanishes (|A-hat| <= 1e-12) or all
/// residuals are zero.
OneStepEstimate one_step(const Dataset& data, const VectorXd& beta, const MatrixXd& theta,
                         const ScoreFunction& score);

/// Standard normal quantile. Throws std::invalid_argument outside (0, 1).
double normal_quantile(double q);

/// Half-width of each side of the box B_{alpha,J}: Phi^{-1}((1 + (1-alpha)^{1/m}) / 2).
double box_quantile(double alpha, Index m);

/// Symmetric PSD square root via eigendecomposition. Eigenvalues down to
/// -1e-10 are clamped to zero; anything more negative throws NumericalError.
MatrixXd psd_sqrt(const MatrixXd& m);

/// center + half_width_matrix * B_{alpha,J}, with B the cube [-q, q]^m.
struct ConfidenceRegion {
  std::vector<Index> J;  // zero-based
  double alpha = 0.1;
  double quantile = 0.0;
  /// (1 / sqrt n) sqrt(mean psi^2) / A-hat
  double scale_s = 0.0;
  double a_hat = 0.0;
  double psi_sq_mean = 0.0;
  VectorXd centers;
  MatrixXd half_width_matrix;
  /// Per-coordinate extent of the region: for m = 1 the usual interval, for
  /// m > 1 the projection of the transformed box onto each axis.
  std::vector<std::pair<double, double>> intervals;

  /// Whether point (indexed like J) lies in the region.
  bool contains(const VectorXd& point) const;
};

ConfidenceRegion confidence_region(const Dataset& data, const OneStepEstimate& one_step,
                                   const MatrixXd& theta, const std::vector<Index>& J, double alpha);

/// V1 = (E[(f'/f)^2])^{-1} and V2 = E[psi^2] / E[psi']^2 under density f,
/// each integrated over the real line.
struct EfficiencyTerms {
  double v1 = 0.0;
  double v2 = 0.0;
};

EfficiencyTerms efficiency_terms(const RealFn& density, const RealFn& density_prime,
                                 const ScoreFunction& score, double quad_tol = 1e-9);

/// Efficiency terms for the unit-scale Student t_df density and its location score.
EfficiencyTerms efficiency_identity_check(int df, double quad_tol = 1e-9);

/// Same for the standard normal density with psi(t) = t.
EfficiencyTerms efficiency_identity_check_gaussian(double quad_tol = 1e-9);

}  // namespace adahuber
