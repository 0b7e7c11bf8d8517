#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cpnray/stochastic.hpp"

using namespace cpnray::stochastic;

namespace {

constexpr int kDraws = 100'000;

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

template <typename Draw>
Moments sample(Draw draw, int n = kDraws) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (auto& x : xs) x = static_cast<double>(draw());
  double sum = 0.0;
  for (double x : xs) sum += x;
  Moments m;
  m.mean = sum / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.variance = ss / (n - 1);
  return m;
}

}  // namespace

TEST_CASE("equal seeds give identical streams; derived seeds differ") {
  RngStream a(99), b(99);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
  RngStream c(99);
  CHECK(c.child(0).seed() != c.child(1).seed());
  CHECK(c.child(3).seed() == RngStream(99).child(3).seed());
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
}

TEST_CASE("discrete") {
  RngStream rng(1);
  for (int i = 0; i < 10'000; ++i) {
    const auto v = discrete(rng, 10000, 70000);
    REQUIRE(v >= 10000);
    REQUIRE(v <= 70000);
  }
  CHECK(discrete(rng, 5, 5) == 5);
  CHECK_THROWS_AS(discrete(rng, 6, 5), std::invalid_argument);

  int ones = 0;
  for (int i = 0; i < kDraws; ++i) ones += static_cast<int>(discrete(rng, 0, 1));
  const double f1 = static_cast<double>(ones) / kDraws;
  CHECK(f1 >= 0.48);
  CHECK(f1 <= 0.52);
  CHECK(1.0 - f1 >= 0.48);
  CHECK(1.0 - f1 <= 0.52);
}

TEST_CASE("rn_normal_int") {
  RngStream rng(2);
  CHECK(rn_normal_int(rng, 20000, 0) == 20000);
  CHECK_THROWS_AS(rn_normal_int(rng, 1, -1), std::invalid_argument);

  const Moments m = sample([&] { return rn_normal_int(rng, 20000, 10000); });
  CHECK(std::abs(m.mean - 20000.0) <= 0.01 * 20000.0);
  // Variance is the second parameter (std 100), not the standard deviation.
  CHECK(m.variance == doctest::Approx(10000.0).epsilon(0.05));

  for (int i = 0; i < kDraws; ++i) REQUIRE(rn_normal_int(rng, 0, 10000) >= 0);
}

TEST_CASE("rn_normal_int_real") {
  RngStream rng(3);
  CHECK(rn_normal_int_real(rng, 0.0, 0.0) == 0);
  for (int i = 0; i < kDraws; ++i) REQUIRE(rn_normal_int_real(rng, 100.0, 70.0) >= 0);
  const Moments m = sample([&] { return rn_normal_int_real(rng, 800.0, 700.0); });
  CHECK(std::abs(m.mean - 800.0) <= 0.02 * 800.0);
}

TEST_CASE("rn_exponential_int") {
  RngStream rng(4);
  CHECK_THROWS_AS(rn_exponential_int(rng, 0.0), std::invalid_argument);
  for (int i = 0; i < 10'000; ++i) REQUIRE(rn_exponential_int(rng, 500.0) >= 0);
  const Moments m = sample([&] { return rn_exponential_int(rng, 500.0); });
  CHECK(std::abs(m.mean - 500.0) <= 0.02 * 500.0);
  CHECK(std::abs(m.variance - 250000.0) <= 0.10 * 250000.0);
}

TEST_CASE("bernoulli") {
  RngStream rng(5);
  CHECK(bernoulli(rng, 1.0));
  CHECK_FALSE(bernoulli(rng, 0.0));
  CHECK_THROWS_AS(bernoulli(rng, 1.5), std::invalid_argument);
  int hits = 0;
  for (int i = 0; i < kDraws; ++i) hits += bernoulli(rng, 0.9) ? 1 : 0;
  const double f = static_cast<double>(hits) / kDraws;
  CHECK(f >= 0.89);
  CHECK(f <= 0.91);
}
