#include "adahuber/inference.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "adahuber/errors.hpp"

namespace adahuber {

OneStepEstimate one_step(const Dataset& data, const VectorXd& beta, const MatrixXd& theta,
                         const ScoreFunction& score) {
  if (beta.size() != data.p()) throw std::invalid_argument("beta length does not match the data");
  if (theta.rows() != data.p() || theta.cols() != data.p()) {
    throw std::invalid_argument("precision matrix must be p x p");
  }
  OneStepEstimate out;
  out.base_beta = beta;
  out.diagnostics = score_diagnostics(data, beta, score);
  if (std::abs(out.diagnostics.a_hat) <= 1e-12) {
    throw NumericalError("A-hat vanishes; the one-step correction is undefined");
  }

  const VectorXd r = data.y() - data.X() * beta;
  VectorXd psi(r.size());
  for (Index i = 0; i < r.size(); ++i) psi(i) = score.psi(r(i) / out.diagnostics.sigma_hat);
  const VectorXd mean_score = data.X().transpose() * psi / static_cast<double>(data.n());
  out.b_psi = beta + theta * mean_score / out.diagnostics.a_hat;
  if (!out.b_psi.allFinite()) throw NumericalError("one-step estimate is not finite");
  return out;
}

double normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("normal quantile needs q in (0, 1), got " + std::to_string(q));
  }
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

double box_quantile(double alpha, Index m) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (m < 1) throw std::invalid_argument("coordinate set must be nonempty");
  const double coverage = std::pow(1.0 - alpha, 1.0 / static_cast<double>(m));
  return normal_quantile(0.5 * (1.0 + coverage));
}

MatrixXd psd_sqrt(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (m + m.transpose()));
  if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  VectorXd values = eig.eigenvalues();
  if (values.minCoeff() < -1e-10) {
    throw NumericalError("matrix has a negative eigenvalue " + std::to_string(values.minCoeff()));
  }
  values = values.cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
}

bool ConfidenceRegion::contains(const VectorXd& point) const {
  const VectorXd d = point - centers;
  const auto qr = half_width_matrix.completeOrthogonalDecomposition();
  const VectorXd z = qr.solve(d);
  if ((half_width_matrix * z - d).norm() > 1e-9 * std::max(1.0, d.norm())) return false;
  return z.cwiseAbs().maxCoeff() <= quantile;
}

ConfidenceRegion confidence_region(const Dataset& data, const OneStepEstimate& one_step,
                                   const MatrixXd& theta, const std::vector<Index>& J, double alpha) {
  if (J.empty()) throw std::invalid_argument("coordinate set J must be nonempty");
  if (J.size() > 10) throw std::invalid_argument("coordinate set J is limited to 10 entries");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  for (std::size_t a = 0; a < J.size(); ++a) {
    if (J[a] < 0 || J[a] >= data.p()) {
      throw std::invalid_argument("coordinate index " + std::to_string(J[a]) + " out of range");
    }
    if (a > 0 && J[a] <= J[a - 1]) throw std::invalid_argument("J must be sorted and distinct");
  }
  const auto& diag = one_step.diagnostics;
  if (std::abs(diag.a_hat) <= 1e-12) throw NumericalError("A-hat vanishes");

  ConfidenceRegion region;
  region.J = J;
  region.alpha = alpha;
  region.a_hat = diag.a_hat;
  region.psi_sq_mean = diag.psi_sq_mean;
  region.scale_s = std::sqrt(diag.psi_sq_mean) / diag.a_hat / std::sqrt(static_cast<double>(data.n()));

  const Index m = static_cast<Index>(J.size());
  region.quantile = box_quantile(alpha, m);
  region.centers.resize(m);
  MatrixXd block(m, m);
  for (Index a = 0; a < m; ++a) {
    region.centers(a) = one_step.b_psi(J[static_cast<std::size_t>(a)]);
    for (Index b = 0; b < m; ++b) {
      block(a, b) = theta(J[static_cast<std::size_t>(a)], J[static_cast<std::size_t>(b)]);
    }
  }
  region.half_width_matrix = std::abs(region.scale_s) * psd_sqrt(block);

  for (Index a = 0; a < m; ++a) {
    const double reach = m == 1 ? std::abs(region.scale_s) * std::sqrt(std::max(block(0, 0), 0.0))
                                : region.half_width_matrix.row(a).cwiseAbs().sum();
    const double half = region.quantile * reach;
    region.intervals.emplace_back(region.centers(a) - half, region.centers(a) + half);
  }
  return region;
}

namespace {

double integrate_line(const std::function<double(double)>& f, double tol) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -inf, inf, 20, tol, &error);
  if (!std::isfinite(value) || error > 100.0 * tol * std::max(1.0, std::abs(value))) {
    throw NumericalError("quadrature did not reach the requested tolerance");
  }
  return value;
}

}  // namespace

EfficiencyTerms efficiency_terms(const RealFn& density, const RealFn& density_prime,
                                 const ScoreFunction& score, double quad_tol) {
  const auto guarded = [](double v) { return std::isfinite(v) ? v : 0.0; };
  const double fisher = integrate_line(
      [&](double t) {
        const double f = density(t);
        if (f <= 0.0) return 0.0;
        const double fp = density_prime(t);
        return guarded(fp * fp / f);
      },
      quad_tol);
  const double psi_sq = integrate_line(
      [&](double t) {
        const double v = score.psi(t);
        return guarded(v * v * density(t));
      },
      quad_tol);
  const double psi_prime = integrate_line(
      [&](double t) { return guarded(score.psi_prime(t) * density(t)); }, quad_tol);
  if (!(fisher > 0.0) || psi_prime == 0.0) {
    throw NumericalError("degenerate density or score in efficiency terms");
  }
  return {1.0 / fisher, psi_sq / (psi_prime * psi_prime)};
}

EfficiencyTerms efficiency_identity_check(int df, double quad_tol) {
  if (df < 3) throw std::invalid_argument("efficiency check needs df >= 3");
  const double nu = df;
  const double norm = std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu)) /
                      std::sqrt(nu * std::numbers::pi);
  const RealFn density = [nu, norm](double t) { return norm * std::pow(1.0 + t * t / nu, -0.5 * (nu + 1.0)); };
  const RealFn density_prime = [nu, density](double t) {
    return -density(t) * (nu + 1.0) * t / (nu + t * t);
  };
  return efficiency_terms(density, density_prime, student_t_score(df), quad_tol);
}

EfficiencyTerms efficiency_identity_check_gaussian(double quad_tol) {
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const RealFn density = [norm](double t) { return norm * std::exp(-0.5 * t * t); };
  const RealFn density_prime = [density](double t) { return -t * density(t); };
  return efficiency_terms(density, density_prime, gaussian_score(), quad_tol);
}

}  // namespace adahuber
