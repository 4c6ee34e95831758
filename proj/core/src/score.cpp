#include "adahuber/score.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "adahuber/errors.hpp"

namespace adahuber {

ScoreFunction gaussian_score() {
  return {"gaussian", [](double t) { return t; }, [](double) { return 1.0; },
          RealFn([](double) { return 0.0; })};
}

ScoreFunction student_t_score(int df) {
  if (df < 1) throw std::invalid_argument("student t score needs df >= 1");
  const double nu = df;
  ScoreFunction s;
  s.name = df == 3 ? "t3" : "t" + std::to_string(df);
  s.psi = [nu](double t) { return (nu + 1.0) * t / (nu + t * t); };
  s.psi_prime = [nu](double t) {
    const double d = nu + t * t;
    return (nu + 1.0) * (nu - t * t) / (d * d);
  };
  s.psi_second = [nu](double t) {
    const double d = nu + t * t;
    return 2.0 * (nu + 1.0) * t * (t * t - 3.0 * nu) / (d * d * d);
  };
  return s;
}

ScoreFunction t3_score() { return student_t_score(3); }

ScoreFunction score_by_name(const std::string& name) {
  if (name == "gaussian") return gaussian_score();
  if (name == "t3") return t3_score();
  throw std::invalid_argument("unknown score '" + name + "' (expected gaussian or t3)");
}

double score_derivative_mismatch(const ScoreFunction& score, double lo, double hi, int points) {
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    const double t = lo + (hi - lo) * (i + 0.5) / points;
    const double h = 1e-5 * std::max(1.0, std::abs(t));
    const double fd = (score.psi(t + h) - score.psi(t - h)) / (2.0 * h);
    const double exact = score.psi_prime(t);
    worst = std::max(worst, std::abs(fd - exact) / std::max(1.0, std::abs(exact)));
  }
  return worst;
}

ScoreFunction make_score(std::string name, RealFn psi, RealFn psi_prime,
                         std::optional<RealFn> psi_second) {
  if (!psi || !psi_prime) throw std::invalid_argument("score needs both psi and psi'");
  ScoreFunction s{std::move(name), std::move(psi), std::move(psi_prime), std::move(psi_second)};
  if (score_derivative_mismatch(s) > 1e-6) {
    throw std::invalid_argument("score '" + s.name +
                                "': psi' disagrees with finite differences of psi");
  }
  return s;
}

double residual_scale(const Dataset& data, const VectorXd& beta) {
  if (beta.size() != data.p()) throw std::invalid_argument("beta length does not match the data");
  const VectorXd r = data.y() - data.X() * beta;
  const double scale = std::sqrt(r.squaredNorm() / static_cast<double>(data.n()));
  if (!(scale > 0.0)) {
    throw NumericalError("all residuals are zero; the residual scale is undefined");
  }
  return scale;
}

double a_hat(const Dataset& data, const VectorXd& beta, double sigma_hat, const ScoreFunction& score) {
  if (!(sigma_hat > 0.0)) throw std::invalid_argument("sigma_hat must be positive");
  const VectorXd r = data.y() - data.X() * beta;
  double sum = 0.0;
  for (Index i = 0; i < r.size(); ++i) sum += score.psi_prime(r(i) / sigma_hat);
  return sum / (static_cast<double>(data.n()) * sigma_hat);
}

ScoreDiagnostics score_diagnostics(const Dataset& data, const VectorXd& beta, const ScoreFunction& score) {
  ScoreDiagnostics d;
  d.sigma_hat = residual_scale(data, beta);
  const VectorXd r = (data.y() - data.X() * beta) / d.sigma_hat;
  double sum_prime = 0.0;
  double sum_sq = 0.0;
  for (Index i = 0; i < r.size(); ++i) {
    sum_prime += score.psi_prime(r(i));
    const double v = score.psi(r(i));
    sum_sq += v * v;
  }
  const double n = static_cast<double>(data.n());
  d.a_hat = sum_prime / (n * d.sigma_hat);
  d.psi_sq_mean = sum_sq / n;
  return d;
}

}  // namespace adahuber
