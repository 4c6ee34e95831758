#include "adahuber/glasso.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "adahuber/errors.hpp"

namespace adahuber {

namespace {

double soft(double v, double t) {
  const double a = std::abs(v) - t;
  return a > 0.0 ? std::copysign(a, v) : 0.0;
}

Eigen::LLT<MatrixXd> factor_pd(const MatrixXd& theta) {
  Eigen::LLT<MatrixXd> llt(theta);
  if (llt.info() != Eigen::Success) throw NumericalError("precision matrix is not positive definite");
  return llt;
}

double log_det(const Eigen::LLT<MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double offdiag_l1(const MatrixXd& m) {
  return m.cwiseAbs().sum() - m.diagonal().cwiseAbs().sum();
}

double objective_with(const CovMatrix& cov, const MatrixXd& theta, double lambda,
                      const Eigen::LLT<MatrixXd>& llt) {
  return theta.cwiseProduct(cov.sigma_hat).sum() - log_det(llt) + lambda * offdiag_l1(theta);
}

double kkt_with(const CovMatrix& cov, const MatrixXd& theta, double lambda, const MatrixXd& W) {
  const MatrixXd& S = cov.sigma_hat;
  double worst = 0.0;
  for (Index c = 0; c < S.cols(); ++c) {
    for (Index r = 0; r < S.rows(); ++r) {
      const double g = S(r, c) - W(r, c);
      double v = 0.0;
      if (r == c) {
        v = std::abs(g);
      } else if (theta(r, c) != 0.0) {
        v = std::abs(g + lambda * (theta(r, c) > 0.0 ? 1.0 : -1.0));
      } else {
        v = std::max(std::abs(g) - lambda, 0.0);
      }
      worst = std::max(worst, v);
    }
  }
  return worst;
}

}  // namespace

CovMatrix sample_cov(const Dataset& data) {
  CovMatrix cov;
  cov.sigma_hat = MatrixXd(data.p(), data.p());
  cov.sigma_hat.setZero();
  cov.sigma_hat.selfadjointView<Eigen::Lower>().rankUpdate(data.X().transpose(),
                                                          1.0 / static_cast<double>(data.n()));
  cov.sigma_hat.triangularView<Eigen::StrictlyUpper>() = cov.sigma_hat.transpose();
  return cov;
}

double default_glasso_lambda(Index n, Index p) {
  return 0.5 * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

double glasso_objective(const CovMatrix& cov, const MatrixXd& theta, double lambda) {
  return objective_with(cov, theta, lambda, factor_pd(theta));
}

double kkt_residual(const CovMatrix& cov, const MatrixXd& theta, double lambda) {
  if (theta.rows() != cov.sigma_hat.rows() || theta.cols() != cov.sigma_hat.cols()) {
    throw std::invalid_argument("theta and covariance dimensions differ");
  }
  const auto llt = factor_pd(theta);
  const MatrixXd W = llt.solve(MatrixXd::Identity(theta.rows(), theta.cols()));
  return kkt_with(cov, theta, lambda, W);
}

PrecisionEstimate graphical_lasso(const CovMatrix& cov, double lambda, double tol, int max_iter) {
  const MatrixXd& S = cov.sigma_hat;
  const Index p = S.rows();
  if (S.cols() != p || p < 1) throw std::invalid_argument("covariance must be square and nonempty");
  if (!(lambda >= 0.0)) throw std::invalid_argument("glasso lambda must be nonnegative");
  if (!(tol > 0.0) || max_iter < 1) throw std::invalid_argument("glasso needs tol > 0 and max_iter >= 1");
  if (!(S.diagonal().minCoeff() > 0.0)) {
    throw std::invalid_argument("covariance has a non-positive diagonal entry");
  }
  if (lambda == 0.0 && Eigen::LLT<MatrixXd>(S).info() != Eigen::Success) {
    throw std::invalid_argument("lambda = 0 requires a positive definite covariance");
  }

  PrecisionEstimate est;
  est.lambda = lambda;
  est.theta = S.diagonal().cwiseInverse().asDiagonal();
  MatrixXd W = S.diagonal().asDiagonal();
  {
    const auto llt = factor_pd(est.theta);
    est.objective_trace.push_back(objective_with(cov, est.theta, lambda, llt));
    est.kkt_residual = kkt_with(cov, est.theta, lambda, W);
  }
  if (est.kkt_residual <= tol) {
    est.converged = true;
    return est;
  }

  const double inner_tol = std::max(1e-3 * tol, 1e-15 * S.diagonal().maxCoeff());
  constexpr int kMaxInnerSweeps = 2000;
  MatrixXd U(p, p);
  VectorXd x(p);
  VectorXd v(p);

  for (int sweep = 1; sweep <= max_iter; ++sweep) {
    for (Index j = 0; j < p; ++j) {
      const double s_jj = S(j, j);
      // U = (Theta_{-j,-j})^{-1}, embedded with a zero row and column j.
      U.noalias() = W - W.col(j) * (W.row(j) / W(j, j));
      U.row(j).setZero();
      U.col(j).setZero();

      x = est.theta.col(j);
      x(j) = 0.0;
      v.noalias() = U * x;

      // min_x  S_{-j,j}^T x + (s_jj / 2) x^T U x + lambda ||x||_1
      for (int inner = 0; inner < kMaxInnerSweeps; ++inner) {
        double largest = 0.0;
        for (Index k = 0; k < p; ++k) {
          if (k == j) continue;
          const double a = s_jj * U(k, k);
          const double g = S(k, j) + s_jj * (v(k) - U(k, k) * x(k));
          const double updated = soft(-g, lambda) / a;
          const double delta = updated - x(k);
          if (delta != 0.0) {
            v.noalias() += delta * U.col(k);
            x(k) = updated;
            largest = std::max(largest, std::abs(delta) * a);
          }
        }
        if (largest <= inner_tol) break;
      }

      for (Index k = 0; k < p; ++k) {
        if (k == j) continue;
        est.theta(k, j) = x(k);
        est.theta(j, k) = x(k);
      }
      est.theta(j, j) = 1.0 / s_jj + x.dot(v);

      W.noalias() = U + s_jj * v * v.transpose();
      W.col(j) = -s_jj * v;
      W.row(j) = -s_jj * v.transpose();
      W(j, j) = s_jj;
    }

    const auto llt = factor_pd(est.theta);
    W = llt.solve(MatrixXd::Identity(p, p));
    W = 0.5 * (W + W.transpose()).eval();
    est.iterations = sweep;
    est.objective_trace.push_back(objective_with(cov, est.theta, lambda, llt));
    est.kkt_residual = kkt_with(cov, est.theta, lambda, W);
    if (est.kkt_residual <= tol) {
      est.converged = true;
      break;
    }
  }
  return est;
}

void write_matrix_csv(const MatrixXd& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  char buf[32];
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
}

void write_sparsity_triplets(const MatrixXd& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "i,j,value\n";
  char buf[32];
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = r; c < m.cols(); ++c) {
      if (m(r, c) == 0.0) continue;
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      out << (r + 1) << ',' << (c + 1) << ',' << buf << '\n';
    }
  }
}

}  // namespace adahuber
