#include "adahuber/dataset.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace adahuber {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

Dataset::Dataset(MatrixXd X, VectorXd y, std::optional<GroundTruth> truth)
    : X_(std::move(X)), y_(std::move(y)), truth_(std::move(truth)) {
  if (X_.rows() < 1 || X_.cols() < 1) {
    throw std::invalid_argument("dataset needs at least one row and one column");
  }
  if (y_.size() != X_.rows()) {
    throw std::invalid_argument("response length " + std::to_string(y_.size()) +
                                " does not match " + std::to_string(X_.rows()) + " rows");
  }
  if (!X_.allFinite() || !y_.allFinite()) {
    throw std::invalid_argument("dataset contains non-finite values");
  }
  if (truth_) {
    if (truth_->beta_star.size() != X_.cols()) {
      throw std::invalid_argument("beta_star length does not match column count");
    }
    if (!(truth_->sigma_star >= 0.0) || !std::isfinite(truth_->sigma_star)) {
      throw std::invalid_argument("sigma_star must be finite and nonnegative");
    }
  }
}

void SimSpec::validate() const {
  if (n < 1 || p < 1) throw std::invalid_argument("n and p must be positive");
  if (k < 1 || k > p) throw std::invalid_argument("k must satisfy 1 <= k <= p");
  if (beta_values.size() != k) {
    throw std::invalid_argument("beta_values must have exactly k entries");
  }
  if (!beta_values.allFinite()) throw std::invalid_argument("beta_values must be finite");
  std::visit(overloaded{[](const GaussianCovariates&) {},
                        [](const StudentTCovariates& c) {
                          if (c.df < 3) {
                            throw std::invalid_argument(
                                "student_t covariates need df >= 3 (finite variance)");
                          }
                        }},
             covariate_dist);
  std::visit(overloaded{[](const GaussianErrors& e) {
                          if (!(e.sd >= 0.0) || !std::isfinite(e.sd)) {
                            throw std::invalid_argument("gaussian error sd must be >= 0");
                          }
                        },
                        [](const StudentTErrors& e) {
                          if (e.df < 3) {
                            throw std::invalid_argument(
                                "student_t errors need df >= 3 (finite variance)");
                          }
                          if (!(e.scale >= 0.0) || !std::isfinite(e.scale)) {
                            throw std::invalid_argument("student_t error scale must be >= 0");
                          }
                        }},
             error_dist);
}

VectorXd SimSpec::beta_star() const {
  VectorXd beta = VectorXd::Zero(p);
  beta.head(k) = beta_values;
  return beta;
}

double error_sd(const ErrorDist& dist) {
  return std::visit(overloaded{[](const GaussianErrors& e) { return e.sd; },
                               [](const StudentTErrors& e) {
                                 const double df = e.df;
                                 return e.scale * std::sqrt(df / (df - 2.0));
                               }},
                    dist);
}

double student_t_sample(int df, Rng& rng) {
  const double z = rng.normal();
  double chi2 = 0.0;
  for (int i = 0; i < df; ++i) {
    const double g = rng.normal();
    chi2 += g * g;
  }
  return z / std::sqrt(chi2 / df);
}

Simulation simulate(const SimSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  MatrixXd X(spec.n, spec.p);
  for (Index i = 0; i < spec.n; ++i) {
    for (Index j = 0; j < spec.p; ++j) {
      X(i, j) = std::visit(
          overloaded{[&](const GaussianCovariates&) { return rng.normal(); },
                     [&](const StudentTCovariates& c) { return student_t_sample(c.df, rng); }},
          spec.covariate_dist);
    }
  }

  VectorXd errors(spec.n);
  for (Index i = 0; i < spec.n; ++i) {
    errors(i) = std::visit(
        overloaded{[&](const GaussianErrors& e) { return e.sd * rng.normal(); },
                   [&](const StudentTErrors& e) { return e.scale * student_t_sample(e.df, rng); }},
        spec.error_dist);
  }

  const VectorXd beta = spec.beta_star();
  VectorXd y(spec.n);
  for (Index i = 0; i < spec.n; ++i) {
    y(i) = X.row(i).dot(beta) + errors(i);
  }

  GroundTruth truth{beta, error_sd(spec.error_dist)};
  return Simulation{Dataset(std::move(X), std::move(y), std::move(truth)), std::move(errors)};
}

Dataset generate(const SimSpec& spec) { return simulate(spec).data; }

}  // namespace adahuber
