#include <cmath>
#include <fstream>
#include <numeric>

#include "adahuber/errors.hpp"
#include "adahuber/glasso.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace adahuber;

namespace {

double offdiag_l1(const MatrixXd& m) { return m.cwiseAbs().sum() - m.diagonal().cwiseAbs().sum(); }

}  // namespace

TEST_CASE("sample_cov") {
  CHECK(sample_cov(Dataset(MatrixXd::Identity(2, 2), VectorXd::Zero(2))).sigma_hat ==
        MatrixXd(0.5 * MatrixXd::Identity(2, 2)));
  const CovMatrix one = sample_cov(Dataset((MatrixXd(1, 2) << 2, -3).finished(), VectorXd::Zero(1)));
  CHECK(one.sigma_hat == (MatrixXd(2, 2) << 4, -6, -6, 9).finished());
  std::mt19937_64 gen(1);
  const MatrixXd X = oracle::gaussian_matrix(5, 3, gen);
  const CovMatrix c = sample_cov(Dataset(X, VectorXd::Zero(5)));
  for (Index a = 0; a < 3; ++a) {
    for (Index b = 0; b < 3; ++b) {
      double s = 0.0;
      for (Index i = 0; i < 5; ++i) s += X(i, a) * X(i, b);
      CHECK(std::abs(c.sigma_hat(a, b) - s / 5.0) <= 1e-14);
      CHECK(c.sigma_hat(a, b) == c.sigma_hat(b, a));
    }
  }
}

TEST_CASE("kkt_residual") {
  const MatrixXd S = (MatrixXd(2, 2) << 1, 0.5, 0.5, 1).finished();
  CHECK(kkt_residual({S}, S.inverse(), 0.0) <= 1e-10);
  CHECK(kkt_residual({MatrixXd::Identity(3, 3)}, MatrixXd::Identity(3, 3), 0.7) == 0.0);
  CHECK(kkt_residual({S}, MatrixXd::Identity(2, 2), 0.1) == doctest::Approx(0.4));
  CHECK_THROWS_AS(kkt_residual({S}, MatrixXd::Zero(2, 2), 0.1), NumericalError);
}

TEST_CASE("lambda = 0 gives the inverse") {
  std::mt19937_64 gen(2);
  for (int t = 0; t < 5; ++t) {
    const MatrixXd S = oracle::random_spd(3 + t, gen);
    const PrecisionEstimate est = graphical_lasso({S}, 0.0, 1e-12);
    CHECK(est.converged);
    CHECK((est.theta - S.inverse()).lpNorm<Eigen::Infinity>() <= 1e-8);
  }
}

TEST_CASE("identity covariance is a fixed point") {
  for (double lambda : {0.0, 0.1, 2.0}) {
    const PrecisionEstimate est = graphical_lasso({MatrixXd::Identity(4, 4)}, lambda);
    CHECK(est.theta == MatrixXd(MatrixXd::Identity(4, 4)));
  }
}

TEST_CASE("2x2 brute-force objective dominance") {
  const MatrixXd S = (MatrixXd(2, 2) << 1, 0.5, 0.5, 1).finished();
  const double lambda = 0.1;
  const PrecisionEstimate est = graphical_lasso({S}, lambda);
  CHECK(est.kkt_residual <= 1e-8);
  const double f = glasso_objective({S}, est.theta, lambda);
  CHECK(f == doctest::Approx(oracle::glasso_objective_2x2(S, est.theta(0, 0), est.theta(0, 1), est.theta(1, 1), lambda)));
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> diag(0.05, 4.0);
  std::uniform_real_distribution<double> off(-2.0, 2.0);
  double best = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 1000000; ++t) {
    best = std::min(best, oracle::glasso_objective_2x2(S, diag(gen), off(gen), diag(gen), lambda));
  }
  CHECK(f <= best + 1e-6);
}

TEST_CASE("KKT certified on random PD matrices") {
  std::mt19937_64 gen(4);
  for (int t = 0; t < 10; ++t) {
    const Index p = 5 + 2 * t;
    const MatrixXd S = oracle::random_spd(p, gen, 0.2);
    const PrecisionEstimate est = graphical_lasso({S}, 0.1);
    CHECK(est.converged);
    CHECK(est.kkt_residual <= 1e-8);
    CHECK(est.kkt_residual == doctest::Approx(kkt_residual({S}, est.theta, 0.1)));
    CHECK((est.theta - est.theta.transpose()).norm() == 0.0);
    CHECK(Eigen::LLT<MatrixXd>(est.theta).info() == Eigen::Success);
    for (std::size_t i = 1; i < est.objective_trace.size(); ++i) {
      CHECK(est.objective_trace[i] <= est.objective_trace[i - 1] + 1e-10);
    }
  }
}

TEST_CASE("singular covariance with positive lambda") {
  std::mt19937_64 gen(5);
  const MatrixXd X = oracle::gaussian_matrix(4, 8, gen);
  const CovMatrix cov = sample_cov(Dataset(X, VectorXd::Zero(4)));
  const PrecisionEstimate est = graphical_lasso(cov, 0.3);
  CHECK(est.converged);
  CHECK(est.kkt_residual <= 1e-8);
  CHECK_THROWS_AS(graphical_lasso(cov, 0.0), std::invalid_argument);
}

TEST_CASE("input validation") {
  MatrixXd S = MatrixXd::Identity(3, 3);
  S(1, 1) = 0.0;
  CHECK_THROWS_AS(graphical_lasso({S}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(graphical_lasso({MatrixXd::Identity(3, 3)}, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(graphical_lasso({MatrixXd::Identity(3, 2)}, 0.1), std::invalid_argument);
}

TEST_CASE("sweep cap is reported") {
  std::mt19937_64 gen(6);
  const MatrixXd S = oracle::random_spd(12, gen, 0.05);
  const PrecisionEstimate est = graphical_lasso({S}, 0.01, 1e-14, 1);
  CHECK_FALSE(est.converged);
  CHECK(est.iterations == 1);
}

TEST_CASE("shrinkage is monotone in lambda") {
  std::mt19937_64 gen(7);
  const MatrixXd S = oracle::random_spd(8, gen, 0.1);
  double prev = std::numeric_limits<double>::infinity();
  for (double lambda : {0.01, 0.05, 0.1, 0.2, 0.5}) {
    const double l1 = offdiag_l1(graphical_lasso({S}, lambda).theta);
    CHECK(l1 <= prev + 1e-8);
    prev = l1;
  }
}

TEST_CASE("permutation equivariance") {
  std::mt19937_64 gen(8);
  for (int t = 0; t < 5; ++t) {
    const Index p = 7;
    const MatrixXd S = oracle::random_spd(p, gen, 0.2);
    std::vector<int> perm(p);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    Eigen::PermutationMatrix<Eigen::Dynamic> P(p);
    for (Index i = 0; i < p; ++i) P.indices()(i) = perm[static_cast<std::size_t>(i)];
    const MatrixXd PS = P * S * P.transpose();
    const MatrixXd a = graphical_lasso({PS}, 0.15, 1e-12).theta;
    const MatrixXd b = P * graphical_lasso({S}, 0.15, 1e-12).theta * P.transpose();
    CHECK((a - b).lpNorm<Eigen::Infinity>() <= 1e-8);
  }
}

TEST_CASE("default lambda and exports") {
  CHECK(default_glasso_lambda(100, 10) == doctest::Approx(0.5 * std::sqrt(std::log(10.0) / 100.0)));
  const MatrixXd m = (MatrixXd(3, 3) << 2, 0, -0.5, 0, 1, 0, -0.5, 0, 3).finished();
  const auto dir = oracle::temp_dir("glasso");
  write_sparsity_triplets(m, dir / "t.csv");
  std::ifstream in(dir / "t.csv");
  const std::string body(std::istreambuf_iterator<char>(in), {});
  CHECK(body == "i,j,value\n1,1,2\n1,3,-0.5\n2,2,1\n3,3,3\n");
  write_matrix_csv(m, dir / "m.csv");
  std::ifstream min(dir / "m.csv");
  std::string first;
  std::getline(min, first);
  CHECK(first == "2,0,-0.5");
}
