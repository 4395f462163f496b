#pragma once

#include <cstdint>
#include <limits>

namespace depthkit {

struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

/// xoshiro256** seeded through splitmix64. The four state words come from a
/// splitmix64 sequence started at `seed ^ splitmix64(stream_id)`, so every
/// (seed, stream) pair gives an independent, reproducible stream.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(RngSpec spec);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform in [0, 1) with 53 bits of mantissa.
  double uniform01() noexcept;

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Uniform in [lo, hi).
double uniform_draw(Rng& rng, double lo, double hi);

/// Uniform in (0, hi]; zero is excluded so reciprocals stay defined.
double positive_uniform_draw(Rng& rng, double hi);

/// Normal(0, sigma) via Box-Muller. Always consumes exactly two uniforms.
double gaussian_draw(Rng& rng, double sigma);

}  // namespace depthkit
