#include "adahuber/scale_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace adahuber {

Index MoMConfig::blocks(Index n) const {
  if (K) {
    if (*K < 1) throw std::invalid_argument("MoM block count K must be positive");
    return *K;
  }
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("MoM delta must lie in (0, 1)");
  const double from_delta = 8.0 * std::log(std::exp(0.125) / delta);
  const double cap = static_cast<double>(n) / 2.0;
  return std::max<Index>(1, static_cast<Index>(std::floor(std::min(from_delta, cap))));
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double median_of_means(const VectorXd& values, Index K) {
  if (K < 1) throw std::invalid_argument("MoM block count K must be positive");
  if (values.size() < K) {
    throw std::invalid_argument("median of means needs n >= K (n = " +
                                std::to_string(values.size()) + ", K = " + std::to_string(K) + ")");
  }
  const Index block = values.size() / K;
  std::vector<double> means(static_cast<std::size_t>(K));
  for (Index b = 0; b < K; ++b) {
    means[static_cast<std::size_t>(b)] = values.segment(b * block, block).mean();
  }
  return median(std::move(means));
}

double median_of_means(const VectorXd& values, const MoMConfig& cfg) {
  return median_of_means(values, cfg.blocks(values.size()));
}

double mad(const VectorXd& values) {
  if (values.size() == 0) throw std::invalid_argument("MAD of an empty sample");
  std::vector<double> v(values.data(), values.data() + values.size());
  const double center = median(v);
  for (auto& x : v) x = std::abs(x - center);
  return median(std::move(v));
}

ScaleGrid ScaleGrid::from_sigma_max(double sigma_max, int M) {
  if (!(sigma_max > 0.0) || !std::isfinite(sigma_max)) {
    throw std::invalid_argument("sigma_max must be positive and finite");
  }
  if (M < 1) throw std::invalid_argument("grid depth M must be at least 1");
  ScaleGrid grid;
  grid.sigma_max = sigma_max;
  grid.M = M;
  grid.sigma_min = std::ldexp(sigma_max, -M);
  // j in J iff sigma_min <= sigma_min 2^j < 2 sigma_max, i.e. 1 <= j <= M.
  for (int j = 1; j <= M; ++j) {
    grid.indices.push_back(j);
    grid.sigmas.push_back(std::ldexp(grid.sigma_min, j));
  }
  return grid;
}

int default_grid_depth(Index n) {
  return static_cast<int>(std::ceil(2.0 * std::cbrt(static_cast<double>(n))));
}

ScaleGrid sigma_bounds(const VectorXd& y, const MoMConfig& cfg, int M) {
  const double second_moment = median_of_means(y.cwiseAbs2(), cfg);
  if (!(second_moment > 0.0)) {
    throw std::invalid_argument("median-of-means estimate of E[y^2] is zero; cannot bracket the scale");
  }
  return ScaleGrid::from_sigma_max(std::sqrt(2.0 * second_moment), M);
}

ScaleGrid sigma_bounds_mad(const VectorXd& y, int M) {
  const double scale = mad(y);
  if (!(scale > 0.0)) throw std::invalid_argument("MAD of the response is zero; cannot bracket the scale");
  return ScaleGrid::from_sigma_max(scale, M);
}

}  // namespace adahuber
