#include "depthkit/rng.hpp"

#include <cmath>
#include <numbers>

#include "depthkit/error.hpp"

namespace depthkit {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(RngSpec spec) {
  std::uint64_t state = spec.seed ^ splitmix64(spec.stream_id);
  for (auto& word : s_) {
    state += 0x9e3779b97f4a7c15ULL;
    word = splitmix64(state);
  }
}

Rng::result_type Rng::operator()() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform01() noexcept {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) noexcept {
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = (*this)();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = (*this)();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double uniform_draw(Rng& rng, double lo, double hi) {
  if (!(lo < hi)) fail(ErrorCode::kInvalidArgument, "uniform_draw requires lo < hi");
  return lo + (hi - lo) * rng.uniform01();
}

double positive_uniform_draw(Rng& rng, double hi) {
  if (!(hi > 0.0)) fail(ErrorCode::kInvalidArgument, "upper bound must be positive");
  // 1 - u maps [0, 1) onto (0, 1].
  return hi * (1.0 - rng.uniform01());
}

double gaussian_draw(Rng& rng, double sigma) {
  if (!(sigma >= 0.0)) fail(ErrorCode::kInvalidArgument, "sigma must be non-negative");
  const double u1 = 1.0 - rng.uniform01();  // (0, 1], log stays finite
  const double u2 = rng.uniform01();
  if (sigma == 0.0) return 0.0;
  return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace depthkit
