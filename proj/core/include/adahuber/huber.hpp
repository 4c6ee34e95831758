#pragma once

#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "adahuber/dataset.hpp"

namespace adahuber {

/// Leverage weights w(x) = min{1, b / ||Bx||_2}.
///
/// `B` unset means the identity. `b = +inf` switches weighting off (w = 1).
struct WeightSpec {
  double b = std::numeric_limits<double>::infinity();
  std::optional<MatrixXd> B;

  static WeightSpec unweighted() { return {}; }
  static WeightSpec identity(double b) { return {b, std::nullopt}; }
  static WeightSpec with_matrix(double b, MatrixXd B) { return {b, std::move(B)}; }

  /// b / lambda_min(B); bounds ||w(x) x||_2 for every x.
  double b_prime() const;
  /// Throws std::invalid_argument unless b > 0 and B is p x p symmetric positive definite.
  void validate(Index p) const;
};

double huber_loss(double u, double tau);
/// Derivative of huber_loss: u clipped to [-tau, tau].
double huber_deriv(double u, double tau);

double weight(const VectorXd& x, const WeightSpec& spec);
/// w(x_i) for every row of X.
VectorXd row_weights(const MatrixXd& X, const WeightSpec& spec);

/// Proximal step with fixed curvature eta (step length 1 / eta).
struct FixedStep {
  double eta = 1.0;
};

/// Backtracking on the curvature: start at eta0 and divide by `shrink` until
/// the proximal-gradient sufficient-decrease condition holds. eta0 <= 0 means
/// "estimate lambda_max((1/n) sum w^3 x x^T) by power iteration".
struct Backtracking {
  double eta0 = 0.0;
  double shrink = 0.5;
};

using StepRule = std::variant<FixedStep, Backtracking>;

struct HuberConfig {
  double tau = 1.0;
  double lambda = 0.1;
  WeightSpec weights;
  StepRule step = Backtracking{};
  /// Stop once the relative objective decrease falls below tol ...
  double tol = 1e-10;
  /// ... and the KKT residual below kkt_tol.
  double kkt_tol = 1e-8;
  int max_iter = 20000;

  void validate(Index p) const;
};

/// lambda = 0.005 * b' * sqrt(log p / n).
double default_lambda(double b_prime, Index n, Index p);

struct Estimate {
  VectorXd beta;
  /// Objective at the initial point followed by one entry per accepted iterate.
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
  double kkt_residual = 0.0;

  double objective_final() const { return objective_trace.empty() ? 0.0 : objective_trace.back(); }
};

/// (1/n) sum_i l_tau((x_i^T beta - y_i) w(x_i)) w(x_i) + lambda tau ||beta||_1
double objective(const VectorXd& beta, const Dataset& data, const HuberConfig& cfg);

/// Gradient of the smooth part only:
/// (1/n) sum_i l'_tau((x_i^T beta - y_i) w(x_i)) w(x_i)^2 x_i.
VectorXd gradient(const VectorXd& beta, const Dataset& data, const HuberConfig& cfg);

VectorXd soft_threshold(const VectorXd& v, double t);

/// Largest violation of the subgradient optimality conditions at beta.
double kkt_check(const VectorXd& beta, const Dataset& data, const HuberConfig& cfg);

/// Composite gradient descent beta <- S_{lambda tau / eta}(beta - grad / eta),
/// started at `init` (zero when absent).
///
/// Running out of iterations is reported through `converged = false`; a
/// non-finite objective throws NumericalError.
Estimate fit_huber(const Dataset& data, const HuberConfig& cfg,
                   const std::optional<VectorXd>& init = std::nullopt);

}  // namespace adahuber
