#include "adahuber/huber.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "adahuber/errors.hpp"

namespace adahuber {

double WeightSpec::b_prime() const {
  if (!B) return b;
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(*B, Eigen::EigenvaluesOnly);
  return b / eig.eigenvalues().minCoeff();
}

void WeightSpec::validate(Index p) const {
  if (!(b > 0.0)) throw std::invalid_argument("weight parameter b must be positive");
  if (!B) return;
  if (B->rows() != p || B->cols() != p) {
    throw std::invalid_argument("weight matrix B must be " + std::to_string(p) + " x " +
                                std::to_string(p));
  }
  if (!B->isApprox(B->transpose(), 1e-12)) {
    throw std::invalid_argument("weight matrix B must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(*B, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) {
    throw std::invalid_argument("weight matrix B must be positive definite");
  }
}

double huber_loss(double u, double tau) {
  const double a = std::abs(u);
  return a <= tau ? 0.5 * u * u : tau * a - 0.5 * tau * tau;
}

double huber_deriv(double u, double tau) { return std::clamp(u, -tau, tau); }

double weight(const VectorXd& x, const WeightSpec& spec) {
  if (spec.B && spec.B->cols() != x.size()) {
    throw std::invalid_argument("weight: dimension mismatch between x and B");
  }
  if (std::isinf(spec.b)) return 1.0;
  const double norm = spec.B ? (*spec.B * x).norm() : x.norm();
  if (norm == 0.0) return 1.0;
  return std::min(1.0, spec.b / norm);
}

VectorXd row_weights(const MatrixXd& X, const WeightSpec& spec) {
  if (std::isinf(spec.b)) return VectorXd::Ones(X.rows());
  if (spec.B && spec.B->cols() != X.cols()) {
    throw std::invalid_argument("weight: dimension mismatch between X and B");
  }
  const VectorXd norms = spec.B ? (X * spec.B->transpose()).rowwise().norm().eval()
                                : X.rowwise().norm().eval();
  VectorXd w(X.rows());
  for (Index i = 0; i < X.rows(); ++i) {
    w(i) = norms(i) == 0.0 ? 1.0 : std::min(1.0, spec.b / norms(i));
  }
  return w;
}

void HuberConfig::validate(Index p) const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be nonnegative");
  }
  if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  if (!(tol >= 0.0) || !(kkt_tol >= 0.0)) {
    throw std::invalid_argument("tolerances must be nonnegative");
  }
  weights.validate(p);
  if (const auto* fixed = std::get_if<FixedStep>(&step); fixed && !(fixed->eta > 0.0)) {
    throw std::invalid_argument("fixed step eta must be positive");
  }
  if (const auto* bt = std::get_if<Backtracking>(&step);
      bt && !(bt->shrink > 0.0 && bt->shrink < 1.0)) {
    throw std::invalid_argument("backtracking shrink must lie in (0, 1)");
  }
}

double default_lambda(double b_prime, Index n, Index p) {
  return 0.005 * b_prime * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

namespace {

void check_dims(const VectorXd& beta, const Dataset& data) {
  if (beta.size() != data.p()) {
    throw std::invalid_argument("beta has length " + std::to_string(beta.size()) +
                                " but the data has " + std::to_string(data.p()) + " columns");
  }
}

// Smooth part of the objective with the row weights cached.
class SmoothLoss {
 public:
  SmoothLoss(const Dataset& data, const HuberConfig& cfg)
      : X_(data.X()),
        y_(data.y()),
        tau_(cfg.tau),
        w_(row_weights(data.X(), cfg.weights)),
        w2_(w_.cwiseAbs2()) {}

  // Value at a point whose fitted values X beta are already known.
  double value(const VectorXd& fitted) const {
    double sum = 0.0;
    for (Index i = 0; i < fitted.size(); ++i) {
      sum += huber_loss((fitted(i) - y_(i)) * w_(i), tau_) * w_(i);
    }
    return sum / static_cast<double>(fitted.size());
  }

  VectorXd grad(const VectorXd& fitted) const {
    VectorXd score(fitted.size());
    for (Index i = 0; i < fitted.size(); ++i) {
      score(i) = huber_deriv((fitted(i) - y_(i)) * w_(i), tau_) * w2_(i);
    }
    return X_.transpose() * score / static_cast<double>(fitted.size());
  }

  // lambda_max((1/n) X^T diag(w^3) X) by power iteration.
  double curvature_bound(int steps = 50) const {
    const VectorXd w3 = w2_.cwiseProduct(w_);
    const double n = static_cast<double>(X_.rows());
    VectorXd v = VectorXd::Constant(X_.cols(), 1.0 / std::sqrt(static_cast<double>(X_.cols())));
    double estimate = 0.0;
    for (int s = 0; s < steps; ++s) {
      const VectorXd u = X_.transpose() * (w3.cwiseProduct(X_ * v)) / n;
      const double norm = u.norm();
      if (norm == 0.0) return 0.0;
      estimate = v.dot(u);
      v = u / norm;
    }
    return std::max(estimate, (X_.transpose() * (w3.cwiseProduct(X_ * v)) / n).norm());
  }

  const MatrixXd& X() const { return X_; }

 private:
  const MatrixXd& X_;
  const VectorXd& y_;
  double tau_;
  VectorXd w_;
  VectorXd w2_;
};

double kkt_from_gradient(const VectorXd& beta, const VectorXd& grad, double penalty) {
  double worst = 0.0;
  for (Index j = 0; j < beta.size(); ++j) {
    const double violation = beta(j) != 0.0
                                 ? std::abs(grad(j) + penalty * (beta(j) > 0.0 ? 1.0 : -1.0))
                                 : std::max(std::abs(grad(j)) - penalty, 0.0);
    worst = std::max(worst, violation);
  }
  return worst;
}

}  // namespace

double objective(const VectorXd& beta, const Dataset& data, const HuberConfig& cfg) {
  check_dims(beta, data);
  const SmoothLoss loss(data, cfg);
  return loss.value(data.X() * beta) + cfg.lambda * cfg.tau * beta.lpNorm<1>();
}

VectorXd gradient(const VectorXd& beta, const Dataset& data, const HuberConfig& cfg) {
  check_dims(beta, data);
  const SmoothLoss loss(data, cfg);
  return loss.grad(data.X() * beta);
}

VectorXd soft_threshold(const VectorXd& v, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("soft_threshold needs t >= 0");
  VectorXd out(v.size());
  for (Index j = 0; j < v.size(); ++j) {
    const double shrunk = std::abs(v(j)) - t;
    out(j) = shrunk > 0.0 ? std::copysign(shrunk, v(j)) : 0.0;
  }
  return out;
}

double kkt_check(const VectorXd& beta, const Dataset& data, const HuberConfig& cfg) {
  return kkt_from_gradient(beta, gradient(beta, data, cfg), cfg.lambda * cfg.tau);
}

Estimate fit_huber(const Dataset& data, const HuberConfig& cfg, const std::optional<VectorXd>& init) {
  cfg.validate(data.p());
  const SmoothLoss loss(data, cfg);
  const double penalty = cfg.lambda * cfg.tau;

  Estimate est;
  est.beta = init ? *init : VectorXd::Zero(data.p());
  check_dims(est.beta, data);

  const bool backtrack = std::holds_alternative<Backtracking>(cfg.step);
  double eta = 0.0;
  double shrink = 0.5;
  if (backtrack) {
    const auto& bt = std::get<Backtracking>(cfg.step);
    shrink = bt.shrink;
    eta = bt.eta0 > 0.0 ? bt.eta0 : loss.curvature_bound();
    if (!(eta > 0.0)) eta = 1.0;  // X^T diag(w^3) X vanishes only when X does
  } else {
    eta = std::get<FixedStep>(cfg.step).eta;
  }

  VectorXd fitted = data.X() * est.beta;
  double smooth = loss.value(fitted);
  double total = smooth + penalty * est.beta.lpNorm<1>();
  if (!std::isfinite(total)) throw NumericalError("Huber objective is not finite at the start point");
  VectorXd grad = loss.grad(fitted);
  est.objective_trace.push_back(total);
  est.kkt_residual = kkt_from_gradient(est.beta, grad, penalty);

  if (est.kkt_residual <= cfg.kkt_tol) {
    est.converged = true;
    return est;
  }

  constexpr int kMaxBacktracks = 60;
  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    VectorXd candidate;
    VectorXd cand_fitted;
    double cand_smooth = 0.0;
    for (int attempt = 0;; ++attempt) {
      candidate = soft_threshold(est.beta - grad / eta, penalty / eta);
      cand_fitted = data.X() * candidate;
      cand_smooth = loss.value(cand_fitted);
      if (!backtrack) break;
      const VectorXd step = candidate - est.beta;
      const double model = smooth + grad.dot(step) + 0.5 * eta * step.squaredNorm();
      const double slack = 16.0 * std::numeric_limits<double>::epsilon() * std::abs(smooth);
      if (cand_smooth <= model + slack || attempt == kMaxBacktracks) break;
      eta /= shrink;
    }

    const double cand_total = cand_smooth + penalty * candidate.lpNorm<1>();
    if (!std::isfinite(cand_total)) {
      throw NumericalError("Huber objective became non-finite at iteration " +
                           std::to_string(iter));
    }
    const double decrease = total - cand_total;

    est.beta = std::move(candidate);
    fitted = std::move(cand_fitted);
    smooth = cand_smooth;
    total = cand_total;
    grad = loss.grad(fitted);
    est.objective_trace.push_back(total);
    est.iterations = iter;
    est.kkt_residual = kkt_from_gradient(est.beta, grad, penalty);

    if (est.kkt_residual <= cfg.kkt_tol && decrease <= cfg.tol * std::abs(total)) {
      est.converged = true;
      break;
    }
  }
  return est;
}

}  // namespace adahuber
