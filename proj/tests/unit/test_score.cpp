#include <cmath>

#include "adahuber/errors.hpp"
#include "adahuber/score.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace adahuber;

namespace {

Dataset residual_data(const VectorXd& r) {
  // X = 0 makes every residual equal to y for any beta.
  return Dataset(MatrixXd::Zero(r.size(), 1), r);
}

}  // namespace

TEST_CASE("t3 score values") {
  const ScoreFunction s = t3_score();
  CHECK(s.name == "t3");
  CHECK(s.psi(0.0) == 0.0);
  CHECK(s.psi(1.0) == 1.0);
  CHECK(s.psi_prime(0.0) == doctest::Approx(4.0 / 3.0));
  CHECK(s.psi_prime(1.0) == doctest::Approx(0.5));
  REQUIRE(s.psi_second);
}

TEST_CASE("gaussian score values") {
  const ScoreFunction s = gaussian_score();
  CHECK(s.psi(2.5) == 2.5);
  CHECK(s.psi_prime(-7.0) == 1.0);
  for (double t = -5; t <= 5; t += 0.37) CHECK(s.psi(-t) == -s.psi(t));
}

TEST_CASE("built-in scores are odd and differentiate correctly") {
  for (const auto& s : {t3_score(), gaussian_score(), student_t_score(5)}) {
    for (double t = -10; t <= 10; t += 0.0173) CHECK(std::abs(s.psi(-t) + s.psi(t)) <= 1e-12);
    CHECK(score_derivative_mismatch(s) <= 1e-6);
  }
}

TEST_CASE("t3 psi'' matches differences of psi'") {
  const ScoreFunction s = t3_score();
  const double h = 1e-5;
  for (double t = -8; t <= 8; t += 0.11) {
    const double fd = (s.psi_prime(t + h) - s.psi_prime(t - h)) / (2 * h);
    CHECK(std::abs(fd - (*s.psi_second)(t)) <= 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("t3 score is -f'/f of the t3 density") {
  const double c = 6.0 * std::sqrt(3.0) / M_PI;
  const ScoreFunction s = t3_score();
  for (double t = -20; t <= 20; t += 0.05) {
    const double f = c / std::pow(3.0 + t * t, 2);
    const double fp = -4.0 * c * t / std::pow(3.0 + t * t, 3);
    CHECK(std::abs(s.psi(t) + fp / f) <= 1e-10);
  }
}

TEST_CASE("t3 score is bounded by 2/sqrt(3)") {
  const ScoreFunction s = t3_score();
  double max = 0.0;
  for (double t = -100; t <= 100; t += 1e-3) max = std::max(max, std::abs(s.psi(t)));
  CHECK(max <= 2.0 / std::sqrt(3.0));
  CHECK(max == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-6));
}

TEST_CASE("score_by_name") {
  CHECK(score_by_name("t3").name == "t3");
  CHECK(score_by_name("gaussian").name == "gaussian");
  CHECK_THROWS_AS(score_by_name("cauchy"), std::invalid_argument);
}

TEST_CASE("make_score checks the derivative") {
  const ScoreFunction ok = make_score("tanh", [](double t) { return std::tanh(t); },
                                      [](double t) { return 1.0 / std::pow(std::cosh(t), 2); });
  CHECK(ok.psi(0.3) == std::tanh(0.3));
  CHECK_THROWS_AS(make_score("bad", [](double t) { return std::tanh(t); }, [](double) { return 1.0; }),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_score("empty", nullptr, [](double) { return 1.0; }), std::invalid_argument);
}

TEST_CASE("residual_scale") {
  CHECK(residual_scale(residual_data((VectorXd(4) << 3, 4, 0, 0).finished()), VectorXd::Zero(1)) == 2.5);
  SimSpec s;
  s.n = 20;
  s.p = 3;
  s.error_dist = GaussianErrors{0.0};
  s.k = 1;
  s.beta_values = VectorXd::Ones(1);
  const Dataset d = generate(s);
  CHECK_THROWS_AS(residual_scale(d, d.truth()->beta_star), NumericalError);
  CHECK_THROWS_AS(residual_scale(d, VectorXd::Zero(2)), std::invalid_argument);
}

TEST_CASE("residual_scale of scaled t3 errors") {
  SimSpec s;
  s.n = 100000;
  s.p = 2;
  s.k = 1;
  s.beta_values = VectorXd::Ones(1);
  s.error_dist = StudentTErrors{3, 0.01};
  s.seed = 8;
  const Dataset d = generate(s);
  CHECK(std::abs(residual_scale(d, d.truth()->beta_star) / (0.01 * std::sqrt(3.0)) - 1.0) <= 0.02);
}

TEST_CASE("a_hat") {
  std::mt19937_64 gen(5);
  const Dataset d(oracle::gaussian_matrix(15, 3, gen), oracle::gaussian_vector(15, gen));
  CHECK(a_hat(d, VectorXd::Zero(3), 2.0, gaussian_score()) == 0.5);
  const Dataset zero = residual_data(VectorXd::Zero(4));
  CHECK(a_hat(zero, VectorXd::Zero(1), 1.0, t3_score()) == doctest::Approx(4.0 / 3.0));
  const Dataset pm = residual_data((VectorXd(2) << 1, -1).finished());
  CHECK(a_hat(pm, VectorXd::Zero(1), 1.0, t3_score()) == doctest::Approx(0.5));
  CHECK_THROWS_AS(a_hat(pm, VectorXd::Zero(1), 0.0, t3_score()), std::invalid_argument);
}

TEST_CASE("score_diagnostics") {
  std::mt19937_64 gen(6);
  for (int t = 0; t < 10; ++t) {
    const Dataset d(oracle::gaussian_matrix(12, 3, gen), oracle::gaussian_vector(12, gen));
    const VectorXd beta = oracle::gaussian_vector(3, gen);
    const ScoreDiagnostics g = score_diagnostics(d, beta, gaussian_score());
    CHECK(g.a_hat == doctest::Approx(1.0 / g.sigma_hat).epsilon(1e-14));
    CHECK(g.psi_sq_mean == doctest::Approx(1.0).epsilon(1e-14));
    const ScoreDiagnostics s = score_diagnostics(d, beta, t3_score());
    CHECK(s.sigma_hat == g.sigma_hat);
    CHECK(s.a_hat == doctest::Approx(a_hat(d, beta, s.sigma_hat, t3_score())));
    CHECK(s.psi_sq_mean >= 0.0);
  }
}
