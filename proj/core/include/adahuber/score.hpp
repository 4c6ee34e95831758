#pragma once

#include <functional>
#include <optional>
#include <string>

#include "adahuber/dataset.hpp"

namespace adahuber {

using RealFn = std::function<double(double)>;

/// A score psi (typically -f'/f for an error density f) with its derivative.
struct ScoreFunction {
  std::string name;
  RealFn psi;
  RealFn psi_prime;
  std::optional<RealFn> psi_second;
};

/// psi(t) = t.
ScoreFunction gaussian_score();

/// Location score of the Student t density with `df` degrees of freedom:
/// psi(t) = (df + 1) t / (df + t^2).
ScoreFunction student_t_score(int df);

/// df = 3: psi(t) = 4t / (3 + t^2), psi'(t) = (12 - 4t^2) / (3 + t^2)^2.
ScoreFunction t3_score();

/// Built-in score by name: "gaussian" or "t3". Throws std::invalid_argument otherwise.
ScoreFunction score_by_name(const std::string& name);

/// Wraps a user-supplied (psi, psi') pair after checking psi' against central
/// differences of psi on [-10, 10]. Throws std::invalid_argument on mismatch.
ScoreFunction make_score(std::string name, RealFn psi, RealFn psi_prime,
                         std::optional<RealFn> psi_second = std::nullopt);

/// Largest relative disagreement between psi' and central differences of psi
/// over `points` lattice points in [lo, hi].
double score_derivative_mismatch(const ScoreFunction& score, double lo = -10.0, double hi = 10.0,
                                 int points = 1000);

struct ScoreDiagnostics {
  double a_hat = 0.0;
  double psi_sq_mean = 0.0;
  double sigma_hat = 0.0;
};

/// sqrt((1/n) sum (y_i - x_i^T beta)^2). Throws NumericalError when every
/// residual is zero.
double residual_scale(const Dataset& data, const VectorXd& beta);

/// (1 / (n sigma_hat)) sum psi'((y_i - x_i^T beta) / sigma_hat).
double a_hat(const Dataset& data, const VectorXd& beta, double sigma_hat, const ScoreFunction& score);

/// sigma_hat, A-hat and (1/n) sum psi^2(r_i / sigma_hat) in one pass.
ScoreDiagnostics score_diagnostics(const Dataset& data, const VectorXd& beta, const ScoreFunction& score);

}  // namespace adahuber
