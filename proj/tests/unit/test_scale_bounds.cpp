#include <cmath>

#include "adahuber/dataset.hpp"
#include "adahuber/scale_bounds.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace adahuber;

TEST_CASE("MoM block count") {
  MoMConfig cfg;
  cfg.delta = 0.05;
  CHECK(cfg.blocks(1000) == 24);
  CHECK(cfg.blocks(30) == 15);
  CHECK(cfg.blocks(1) == 1);
  cfg.K = 3;
  CHECK(cfg.blocks(1000) == 3);
  cfg.K.reset();
  cfg.delta = 1.5;
  CHECK_THROWS_AS(cfg.blocks(10), std::invalid_argument);
}

TEST_CASE("median_of_means") {
  CHECK(median_of_means(VectorXd::Constant(9, 2.5), 4) == 2.5);
  CHECK(median_of_means((VectorXd(6) << 1, 2, 3, 4, 5, 6).finished(), 3) == 3.5);
  // Even K averages the central pair; the trailing 7 is discarded.
  CHECK(median_of_means((VectorXd(9) << 1, 2, 3, 4, 5, 6, 7, 8, 100).finished(), 4) == 4.5);
  const VectorXd v = (VectorXd(5) << 1, 4, 2, 8, 5).finished();
  CHECK(median_of_means(v, 1) == doctest::Approx(4.0));
  CHECK_THROWS_AS(median_of_means(v, 6), std::invalid_argument);
  CHECK_THROWS_AS(median_of_means(v, 0), std::invalid_argument);
}

TEST_CASE("median_of_means shifts with the data") {
  std::mt19937_64 gen(3);
  for (int t = 0; t < 20; ++t) {
    const VectorXd v = oracle::gaussian_vector(50, gen);
    const double c = 0.25 * t;
    CHECK(median_of_means(v.array() + c, 7) == doctest::Approx(median_of_means(v, 7) + c).epsilon(1e-14));
  }
}

TEST_CASE("median and MAD") {
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CHECK_THROWS_AS(median({}), std::invalid_argument);
  CHECK(mad((VectorXd(3) << 1, 2, 3).finished()) == 1.0);
  CHECK(mad(VectorXd::Constant(7, -4.0)) == 0.0);
  CHECK_THROWS_AS(mad(VectorXd(0)), std::invalid_argument);
}

TEST_CASE("MAD of standard normals") {
  Rng rng(10);
  VectorXd z(1000000);
  for (Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  CHECK(std::abs(mad(z) - oracle::Phi_inv(0.75)) < 0.01);
}

TEST_CASE("ScaleGrid from sigma_max") {
  const ScaleGrid g = ScaleGrid::from_sigma_max(std::sqrt(2.0), 2);
  CHECK(g.sigma_max == std::sqrt(2.0));
  CHECK(g.sigma_min == std::sqrt(2.0) / 4);
  CHECK(g.M == 2);
  REQUIRE(g.sigmas.size() == 2);
  CHECK(g.indices == std::vector<int>{1, 2});
  CHECK(g.sigmas[0] == std::sqrt(2.0) / 2);
  CHECK(g.sigmas[1] == std::sqrt(2.0));
  const ScaleGrid g10 = ScaleGrid::from_sigma_max(3.0, 10);
  CHECK(g10.sigma_min == 3.0 / 1024.0);
  for (std::size_t j = 0; j < g10.sigmas.size(); ++j) {
    CHECK(g10.sigmas[j] == g10.sigma_min * std::ldexp(1.0, static_cast<int>(j) + 1));
    CHECK(g10.sigmas[j] >= g10.sigma_min);
    CHECK(g10.sigmas[j] < 2 * g10.sigma_max);
  }
  CHECK(static_cast<double>(g10.sigmas.size()) <= std::log2(2 * g10.sigma_max / g10.sigma_min));
  CHECK_THROWS_AS(ScaleGrid::from_sigma_max(0.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(ScaleGrid::from_sigma_max(1.0, 0), std::invalid_argument);
}

TEST_CASE("sigma_bounds") {
  MoMConfig cfg;
  cfg.K = 2;
  const ScaleGrid g = sigma_bounds(VectorXd::Ones(4), cfg, 2);
  CHECK(g.sigma_max == doctest::Approx(std::sqrt(2.0)));
  CHECK(g.sigma_min == doctest::Approx(std::sqrt(2.0) / 4));
  CHECK_THROWS_AS(sigma_bounds(VectorXd::Zero(4), cfg, 2), std::invalid_argument);
  CHECK(default_grid_depth(100) == 10);
  CHECK(default_grid_depth(400) == 15);
  CHECK(default_grid_depth(8) == 4);
  const ScaleGrid mad_grid = sigma_bounds_mad((VectorXd(3) << 1, 2, 4).finished(), 3);
  CHECK(mad_grid.sigma_max == 1.0);
}

TEST_CASE("sigma_max^2 brackets E[y^2] = 1 for normal data") {
  MoMConfig cfg;
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Rng rng(derive_seed(123, seed));
    VectorXd y(200);
    for (Index i = 0; i < 200; ++i) y(i) = rng.normal();
    const double s2 = std::pow(sigma_bounds(y, cfg, 4).sigma_max, 2);
    if (s2 >= 1.0 && s2 <= 3.0) ++inside;
  }
  CHECK(inside >= 495);
}
