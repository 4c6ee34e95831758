#pragma once

#include <array>
#include <cstdint>

namespace adahuber {

/// One SplitMix64 output for state x: the mix of x + 0x9E3779B97F4A7C15.
/// Used for seeding and for deriving per-stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for stream `stream` (e.g. a trial index) derived from a master seed:
/// splitmix64(seed + 0x9E3779B97F4A7C15 * (stream + 1)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// xoshiro256** generator with explicit, copyable state.
///
/// Normal deviates use the polar-free Box-Muller transform; the second
/// deviate of each pair is cached in the state, so copying an Rng copies
/// the pending deviate too. Output is identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();

 private:
  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace adahuber
