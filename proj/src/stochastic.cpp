#include "cpnray/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cpnray::stochastic {

double RngStream::next_unit() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

RngStream RngStream::child(std::uint64_t index) const {
  return RngStream(derive_seed(seed_, index));
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return mix64(mix64(parent) ^ mix64(index + 0x9e3779b97f4a7c15ULL));
}

std::int64_t discrete(RngStream& rng, std::int64_t lo, std::int64_t hi) {
  if (lo > hi) {
    throw std::invalid_argument("discrete: empty interval [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
  }
  const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  if (span == std::numeric_limits<std::uint64_t>::max()) {
    return static_cast<std::int64_t>(rng.next_u64());
  }
  const std::uint64_t range = span + 1;
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x;
  do {
    x = rng.next_u64();
  } while (x >= limit);
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + x % range);
}

double standard_normal(RngStream& rng) {
  const double u1 = 1.0 - rng.next_unit();  // (0, 1]
  const double u2 = rng.next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::int64_t rn_normal_int(RngStream& rng, double mean, double variance) {
  if (!(variance >= 0.0)) throw std::invalid_argument("rn_normal_int: negative variance");
  if (variance == 0.0) return std::max<std::int64_t>(0, std::llround(mean));
  const double x = mean + std::sqrt(variance) * standard_normal(rng);
  return std::max<std::int64_t>(0, std::llround(x));
}

std::int64_t rn_normal_int_real(RngStream& rng, double mean, double variance) {
  return rn_normal_int(rng, mean, variance);
}

std::int64_t rn_exponential_int(RngStream& rng, double mean) {
  if (!(mean > 0.0)) throw std::invalid_argument("rn_exponential_int: mean must be positive");
  const double u = 1.0 - rng.next_unit();  // (0, 1]
  return std::llround(-mean * std::log(u));
}

bool bernoulli(RngStream& rng, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bernoulli: p outside [0, 1]");
  return rng.next_unit() < p;
}

}  // namespace cpnray::stochastic
