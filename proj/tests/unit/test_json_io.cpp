#include <fstream>

#include "adahuber/errors.hpp"
#include "adahuber/json_io.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace adahuber;

TEST_CASE("finite_or_null") {
  CHECK(finite_or_null(1.5) == Json(1.5));
  CHECK(finite_or_null(std::nan("")).is_null());
  CHECK(finite_or_null(std::numeric_limits<double>::infinity()).is_null());
}

TEST_CASE("SimSpec round trip") {
  SimSpec s;
  s.n = 50;
  s.p = 7;
  s.k = 2;
  s.beta_values = (VectorXd(2) << 0.25, -3.0).finished();
  s.covariate_dist = StudentTCovariates{4};
  s.error_dist = StudentTErrors{3, 0.01};
  s.seed = 12345678901234ULL;
  const Json j = to_json_value(s);
  const SimSpec back = sim_spec_from_json(j);
  CHECK(to_json_value(back) == j);
  CHECK(generate(back).y() == generate(s).y());

  SimSpec g;
  g.error_dist = GaussianErrors{0.5};
  CHECK(to_json_value(sim_spec_from_json(to_json_value(g))) == to_json_value(g));
}

TEST_CASE("SimSpec parsing rejects bad input") {
  Json j = to_json_value(SimSpec{});
  j["colour"] = "red";
  CHECK_THROWS_AS(sim_spec_from_json(j), ParseError);
  Json bad = to_json_value(SimSpec{});
  bad["n"] = "many";
  CHECK_THROWS(sim_spec_from_json(bad));
}

TEST_CASE("estimate documents") {
  std::mt19937_64 gen(3);
  const Dataset d(oracle::gaussian_matrix(30, 4, gen), oracle::gaussian_vector(30, gen));
  HuberConfig cfg;
  cfg.tau = 1.0;
  cfg.lambda = 0.01;
  const Estimate est = fit_huber(d, cfg);
  const Json j = to_json_value(est);
  CHECK(j["converged"] == est.converged);
  CHECK(beta_from_json(j) == est.beta);

  Json os;
  os["b_psi"] = to_json_value(est.beta);
  CHECK(beta_from_json(os) == est.beta);
  CHECK_THROWS(beta_from_json(Json::object()));
}

TEST_CASE("confidence region JSON uses 1-based J") {
  const Dataset d(MatrixXd::Identity(4, 4), VectorXd::Ones(4));
  const OneStepEstimate est = one_step(d, VectorXd::Zero(4), MatrixXd::Identity(4, 4), t3_score());
  const Json j = to_json_value(confidence_region(d, est, MatrixXd::Identity(4, 4), {0, 2}, 0.1));
  CHECK(j["J"] == Json::array({1, 3}));
  CHECK(j["intervals"].size() == 2);
}

TEST_CASE("file round trip") {
  const auto dir = oracle::temp_dir("json_io");
  Json j;
  j["schema"] = 1;
  j["values"] = to_json_value((VectorXd(3) << 1, 2.5, -1e-300).finished());
  write_json(j, dir / "x.json");
  CHECK(read_json(dir / "x.json") == j);
  std::ofstream(dir / "bad.json") << "{ not json";
  CHECK_THROWS_AS(read_json(dir / "bad.json"), ParseError);
  CHECK_THROWS(read_json(dir / "missing.json"));
}
