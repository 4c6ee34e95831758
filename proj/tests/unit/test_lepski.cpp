#include <cmath>

#include "adahuber/errors.hpp"
#include "adahuber/lepski.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace adahuber;

namespace {

Candidate cand(int index, double sigma, VectorXd beta, bool admissible = true) {
  return Candidate{index, sigma, std::move(beta), admissible};
}

VectorXd vec2(double a, double b) { return (VectorXd(2) << a, b).finished(); }

Dataset fig1_data(Index n, std::uint64_t seed) {
  SimSpec s;
  s.n = n;
  s.p = 200;
  s.k = 4;
  s.beta_values = VectorXd::Ones(4);
  s.error_dist = StudentTErrors{3, 0.01};
  s.seed = seed;
  return generate(s);
}

LepskiConfig fig1_config() {
  LepskiConfig cfg;
  cfg.C = 20;
  cfg.k = 4;
  cfg.huber.weights = WeightSpec::identity(1.0);
  return cfg;
}

}  // namespace

TEST_CASE("thresholds") {
  const auto [l2, l1] = lepski_thresholds(4.0, 1.0, 1, 100, 100);
  const double r = std::sqrt(std::log(100.0) / 100.0);
  CHECK(r == doctest::Approx(0.21460).epsilon(1e-4));
  CHECK(l2 == doctest::Approx(24.0 * r));
  CHECK(l1 == doctest::Approx(96.0 * r));
  const auto [m2, m1] = lepski_thresholds(2.0, 20.0, 4, 400, 200);
  CHECK(m2 == doctest::Approx(6 * 20 * 2 * 2 * std::sqrt(std::log(200.0) / 400)));
  CHECK(m1 == doctest::Approx(24 * 20 * 2 * 4 * std::sqrt(std::log(200.0) / 400)));
}

TEST_CASE("hand-enumerated three point grid") {
  const std::vector<Candidate> c = {cand(1, 2, vec2(10, 0)), cand(2, 4, vec2(0, 0)), cand(3, 8, vec2(0.1, 0))};
  const LepskiResult r = select(c, 1.0, 1, 100, 100);
  REQUIRE(r.j_star);
  CHECK(*r.j_star == 2);
  CHECK(r.beta == vec2(0, 0));
  REQUIRE(r.comparison_log.size() == 3);
  const Comparison& c12 = r.comparison_log[0];
  CHECK(c12.j == 1);
  CHECK(c12.i == 2);
  CHECK(c12.l2 == 10.0);
  CHECK(c12.l2_threshold == doctest::Approx(5.150).epsilon(1e-3));
  CHECK(c12.l1_threshold == doctest::Approx(20.60).epsilon(1e-3));
  CHECK_FALSE(c12.pass);
  const Comparison& c23 = r.comparison_log[2];
  CHECK(c23.l2_threshold == doctest::Approx(10.30).epsilon(1e-3));
  CHECK(c23.l1_threshold == doctest::Approx(41.21).epsilon(1e-3));
  CHECK(c23.pass);
}

TEST_CASE("identical estimates select the smallest index") {
  std::vector<Candidate> c;
  for (int j = 1; j <= 5; ++j) c.push_back(cand(j, std::ldexp(1.0, j), vec2(1, 2)));
  const LepskiResult r = select(c, 20, 4, 100, 200);
  CHECK(*r.j_star == 1);
  CHECK(r.comparison_log.size() == 10);
}

TEST_CASE("single grid point is selected vacuously") {
  const LepskiResult r = select({cand(3, 1.0, vec2(5, 5))}, 1, 1, 10, 10);
  CHECK(*r.j_star == 3);
  CHECK(r.comparison_log.empty());
}

TEST_CASE("inadmissible candidates are compared but never chosen") {
  const std::vector<Candidate> c = {cand(1, 1, vec2(0, 0), false), cand(2, 2, vec2(0, 0)), cand(3, 4, vec2(0, 0))};
  CHECK(*select(c, 1, 1, 100, 100).j_star == 2);
  const std::vector<Candidate> none = {cand(1, 1, vec2(0, 0), false), cand(2, 2, vec2(0, 0), false)};
  CHECK_FALSE(select(none, 1, 1, 100, 100).j_star);
}

TEST_CASE("select preconditions") {
  CHECK_THROWS_AS(select({}, 1, 1, 10, 10), std::invalid_argument);
  CHECK_THROWS_AS(select({cand(1, 1, vec2(0, 0))}, 1, 1, 1, 10), std::invalid_argument);
  CHECK_THROWS_AS(select({cand(1, 2, vec2(0, 0)), cand(2, 1, vec2(0, 0))}, 1, 1, 10, 10), std::invalid_argument);
}

TEST_CASE("selection properties on random candidate sets") {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> z;
  for (int t = 0; t < 200; ++t) {
    std::vector<Candidate> c;
    double sigma = 0.1;
    for (int j = 1; j <= 6; ++j) {
      sigma *= 2;
      c.push_back(cand(j, sigma, vec2(z(gen), z(gen)) * 0.5));
    }
    const LepskiResult r = select(c, 0.3, 1, 50, 20);
    REQUIRE(r.j_star);  // the largest index passes vacuously
    const int js = *r.j_star;
    for (const auto& cmp : r.comparison_log) {
      if (cmp.j == js) CHECK(cmp.pass);
    }
    if (js > 1) {
      bool some_fail = false;
      for (const auto& cmp : r.comparison_log) some_fail |= (cmp.j == js - 1 && !cmp.pass);
      CHECK(some_fail);
    }
    // thresholds increase with sigma_i for fixed j
    for (std::size_t a = 1; a < r.comparison_log.size(); ++a) {
      const auto& prev = r.comparison_log[a - 1];
      const auto& cur = r.comparison_log[a];
      if (prev.j == cur.j) {
        CHECK(cur.l2_threshold > prev.l2_threshold);
        CHECK(cur.l1_threshold > prev.l1_threshold);
      }
    }
    // joint scaling of sigmas and betas leaves the choice unchanged
    for (double s : {0.01, 7.0}) {
      std::vector<Candidate> scaled = c;
      for (auto& x : scaled) {
        x.sigma *= s;
        x.beta *= s;
      }
      CHECK(*select(scaled, 0.3, 1, 50, 20).j_star == js);
    }
  }
}

TEST_CASE("adaptive_fit on noiseless data") {
  SimSpec s;
  s.n = 60;
  s.p = 10;
  s.k = 2;
  s.beta_values = VectorXd::Ones(2);
  s.error_dist = GaussianErrors{0.0};
  s.seed = 4;
  const Dataset d = generate(s);
  LepskiConfig cfg;
  cfg.k = 2;
  cfg.lambda = 1e-8;
  cfg.huber.weights = WeightSpec::unweighted();
  cfg.huber.kkt_tol = 1e-12;
  const LepskiResult r = adaptive_fit(d, cfg, ScaleGrid::from_sigma_max(4.0, 4));
  REQUIRE(r.j_star);
  CHECK(*r.j_star == 1);
  for (const auto& f : r.per_grid) CHECK((f.estimate.beta - d.truth()->beta_star).norm() <= 1e-6);
}

TEST_CASE("adaptive_fit bookkeeping") {
  const Dataset d = fig1_data(100, 5);
  LepskiConfig cfg = fig1_config();
  const LepskiResult r = adaptive_fit(d, cfg, MoMConfig{});
  REQUIRE(r.j_star);
  CHECK(r.grid.M == default_grid_depth(100));
  CHECK(r.per_grid.size() == static_cast<std::size_t>(r.grid.M));
  CHECK(r.comparison_log.size() == static_cast<std::size_t>(r.grid.M * (r.grid.M - 1) / 2));
  CHECK(r.lambda == doctest::Approx(default_lambda(1.0, 100, 200)));
  for (std::size_t j = 0; j < r.per_grid.size(); ++j) {
    CHECK(r.per_grid[j].index == static_cast<int>(j) + 1);
    CHECK(r.per_grid[j].tau == doctest::Approx(3.0 * r.grid.sigmas[j]));
  }
  CHECK(r.beta == r.per_grid[static_cast<std::size_t>(*r.j_star - 1)].estimate.beta);

  const LepskiResult again = adaptive_fit(d, cfg, MoMConfig{});
  REQUIRE(again.comparison_log.size() == r.comparison_log.size());
  for (std::size_t a = 0; a < r.comparison_log.size(); ++a) {
    CHECK(again.comparison_log[a].l2 == r.comparison_log[a].l2);
    CHECK(again.comparison_log[a].pass == r.comparison_log[a].pass);
  }
}

TEST_CASE("no selection without fallback is an error") {
  const Dataset d = fig1_data(100, 5);
  LepskiConfig cfg = fig1_config();
  cfg.huber.max_iter = 1;
  CHECK_THROWS_AS(adaptive_fit(d, cfg, ScaleGrid::from_sigma_max(0.05, 3)), SelectionError);
  cfg.fallback = true;
  const LepskiResult r = adaptive_fit(d, cfg, ScaleGrid::from_sigma_max(0.05, 3));
  CHECK(r.used_fallback);
  CHECK(*r.j_star == 3);
}

TEST_CASE("LepskiConfig validation") {
  LepskiConfig cfg;
  cfg.C = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = LepskiConfig{};
  cfg.k = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("fig1 setup: error small and within the C-inflated bound") {
  int small = 0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    const Dataset d = fig1_data(400, derive_seed(2718, static_cast<std::uint64_t>(s)));
    const LepskiResult r = adaptive_fit(d, fig1_config(), MoMConfig{});
    REQUIRE(r.j_star);
    const double err = (r.beta - d.truth()->beta_star).norm();
    if (err < 0.5) ++small;
    const double bound = 18.0 * 20.0 * d.truth()->sigma_star * std::sqrt(4.0 * std::log(200.0) / 400.0);
    CHECK(err <= bound);
  }
  CHECK(small >= 18);
}
