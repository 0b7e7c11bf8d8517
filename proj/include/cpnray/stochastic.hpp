#pragma once

#include <cstdint>
#include <random>

namespace cpnray::stochastic {

/// Seeded random stream backed by std::mt19937_64, whose output sequence is
/// fixed by the C++ standard. The distributions below are implemented here
/// rather than with <random>'s distribution classes, whose algorithms are
/// implementation-defined, so draws are identical across toolchains.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }
  /// Uniform real in [0, 1) with 53 bits of resolution.
  double next_unit();

  /// Child stream for substream `index`; see derive_seed.
  RngStream child(std::uint64_t index) const;

  friend bool operator==(const RngStream& a, const RngStream& b) {
    return a.seed_ == b.seed_ && a.engine_ == b.engine_;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for substream `index` of `parent`: mix64(mix64(parent) ^ mix64(index + golden)).
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

/// Uniform integer in [lo, hi] inclusive. Throws std::invalid_argument if lo > hi.
std::int64_t discrete(RngStream& rng, std::int64_t lo, std::int64_t hi);

/// Normal(mean, variance) rounded to the nearest integer and clamped below at 0.
/// `variance` is the variance, not the standard deviation.
std::int64_t rn_normal_int(RngStream& rng, double mean, double variance);

/// Same contract as rn_normal_int; the model's complexity split calls it by this name.
std::int64_t rn_normal_int_real(RngStream& rng, double mean, double variance);

/// Exponential with the given mean, rounded to the nearest integer.
std::int64_t rn_exponential_int(RngStream& rng, double mean);

bool bernoulli(RngStream& rng, double p);

/// Standard normal deviate (Box-Muller, one draw per pair of uniforms).
double standard_normal(RngStream& rng);

}  // namespace cpnray::stochastic
