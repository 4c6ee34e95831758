#include "adahuber/lepski.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "adahuber/errors.hpp"

namespace adahuber {

void LepskiConfig::validate() const {
  if (!(C > 0.0)) throw std::invalid_argument("Lepski constant C must be positive");
  if (k < 1) throw std::invalid_argument("sparsity k must be at least 1");
  if (M && *M < 1) throw std::invalid_argument("grid depth M must be at least 1");
  if (lambda && !(*lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  if (!(tau_factor > 0.0)) throw std::invalid_argument("tau_factor must be positive");
}

std::pair<double, double> lepski_thresholds(double sigma_i, double C, Index k, Index n, Index p) {
  const double rate = std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
  const double kd = static_cast<double>(k);
  return {6.0 * C * sigma_i * std::sqrt(kd) * rate, 24.0 * C * sigma_i * kd * rate};
}

LepskiResult select(const std::vector<Candidate>& candidates, double C, Index k, Index n, Index p) {
  if (candidates.empty()) throw std::invalid_argument("Lepski selection over an empty grid");
  if (n < 2 || p < 2) throw std::invalid_argument("Lepski thresholds need n >= 2 and p >= 2");
  for (std::size_t a = 1; a < candidates.size(); ++a) {
    if (!(candidates[a].sigma > candidates[a - 1].sigma)) {
      throw std::invalid_argument("Lepski candidates must be ordered by increasing sigma");
    }
  }

  LepskiResult result;
  const std::size_t count = candidates.size();
  std::vector<bool> passes_all(count, true);
  for (std::size_t a = 0; a < count; ++a) {
    for (std::size_t b = a + 1; b < count; ++b) {
      const VectorXd diff = candidates[b].beta - candidates[a].beta;
      const auto [t2, t1] = lepski_thresholds(candidates[b].sigma, C, k, n, p);
      Comparison cmp;
      cmp.j = candidates[a].index;
      cmp.i = candidates[b].index;
      cmp.l2 = diff.norm();
      cmp.l1 = diff.lpNorm<1>();
      cmp.l2_threshold = t2;
      cmp.l1_threshold = t1;
      cmp.pass = cmp.l2 <= t2 && cmp.l1 <= t1;
      if (!cmp.pass) passes_all[a] = false;
      result.comparison_log.push_back(cmp);
    }
  }
  for (std::size_t a = 0; a < count; ++a) {
    if (candidates[a].admissible && passes_all[a]) {
      result.j_star = candidates[a].index;
      result.beta = candidates[a].beta;
      break;
    }
  }
  return result;
}

LepskiResult adaptive_fit(const Dataset& data, const LepskiConfig& cfg, const ScaleGrid& grid) {
  cfg.validate();
  if (grid.sigmas.empty()) throw std::invalid_argument("scale grid is empty");

  HuberConfig huber = cfg.huber;
  huber.lambda = cfg.lambda ? *cfg.lambda
                            : default_lambda(huber.weights.b_prime(), data.n(), data.p());

  const std::size_t count = grid.sigmas.size();
  std::vector<GridFit> fits(count);
  std::optional<VectorXd> warm;
  for (std::size_t r = count; r-- > 0;) {
    huber.tau = cfg.tau_factor * grid.sigmas[r];
    fits[r].index = grid.indices[r];
    fits[r].sigma = grid.sigmas[r];
    fits[r].tau = huber.tau;
    fits[r].estimate = fit_huber(data, huber, warm);
    warm = fits[r].estimate.beta;
  }

  std::vector<Candidate> candidates;
  candidates.reserve(count);
  for (const auto& f : fits) {
    candidates.push_back({f.index, f.sigma, f.estimate.beta, f.estimate.converged});
  }

  LepskiResult result = select(candidates, cfg.C, cfg.k, data.n(), data.p());
  result.grid = grid;
  result.lambda = huber.lambda;
  result.per_grid = std::move(fits);
  if (!result.j_star) {
    if (!cfg.fallback) {
      throw SelectionError("Lepski's rule selected no grid index (j* = infinity)");
    }
    result.used_fallback = true;
    result.j_star = result.per_grid.back().index;
    result.beta = result.per_grid.back().estimate.beta;
  }
  return result;
}

LepskiResult adaptive_fit(const Dataset& data, const LepskiConfig& cfg, const MoMConfig& mom) {
  const int M = cfg.M ? *cfg.M : default_grid_depth(data.n());
  return adaptive_fit(data, cfg, sigma_bounds(data.y(), mom, M));
}

}  // namespace adahuber
