#include <cmath>

#include "doctest.h"
#include "synoq/noise.hpp"

using namespace synoq;

TEST_CASE("one-sided laplace mode location") {
  // Independent high-precision evaluation of mu = 1 - ln(delta(e^eps+1))/eps.
  const long double eps = 1.5L, delta = 5e-5L;
  const long double mu =
      1.0L - std::log(delta * (std::exp(eps) + 1.0L)) / eps;
  OneSidedLaplace s(1.5, 5e-5);
  CHECK(s.mu() == doctest::Approx(static_cast<double>(mu)).epsilon(1e-12));
  CHECK(s.mu() == doctest::Approx(6.468).epsilon(1e-3));
}

TEST_CASE("one-sided laplace sign clamps") {
  OneSidedLaplace s(1.5, 5e-5);
  Rng rng = seeded_rng(7);
  for (int i = 0; i < 20000; ++i) {
    CHECK(s.sample(NoiseSign::Positive, rng) >= 0);
    CHECK(s.sample(NoiseSign::Negative, rng) <= 0);
  }
}

TEST_CASE("one-sided laplace rejects invalid parameters") {
  CHECK_THROWS_AS(OneSidedLaplace(0.0, 1e-4), InvalidParameter);
  CHECK_THROWS_AS(OneSidedLaplace(-1.0, 1e-4), InvalidParameter);
  CHECK_THROWS_AS(OneSidedLaplace(1.5, 0.0), InvalidParameter);
  CHECK_THROWS_AS(OneSidedLaplace(1.5, 1.0), InvalidParameter);
  // delta * (e^eps + 1) >= e^eps leaves no room for the tail bound
  CHECK_THROWS_AS(OneSidedLaplace(0.1, 0.6), InvalidParameter);
}

TEST_CASE("raw draw tail mass stays near delta") {
  const double delta = 5e-5;
  OneSidedLaplace s(1.5, delta);
  Rng rng = seeded_rng(11);
  const int n = 100000;
  int below = 0;
  for (int i = 0; i < n; ++i) {
    if (s.raw_draw(rng) < 1) ++below;
  }
  const double frac = static_cast<double>(below) / n;
  CHECK(frac <= delta + 4.0 * std::sqrt(delta / n));
}

TEST_CASE("sampling is reproducible per seed") {
  OneSidedLaplace s(1.5, 5e-5);
  Rng a = seeded_rng(42), b = seeded_rng(42);
  for (int i = 0; i < 100; ++i) CHECK(s.raw_draw(a) == s.raw_draw(b));
}

TEST_CASE("report_noisy_max dominates the true maximum") {
  Rng rng = seeded_rng(3);
  CHECK_THROWS_AS(report_noisy_max({}, 1.5, rng), InvalidParameter);
  CHECK(report_noisy_max({5}, 1.5, rng) >= 5);
  CHECK(report_noisy_max({3, 3, 3}, 1.5, rng) >= 3);
  std::uniform_int_distribution<i64> count(0, 50);
  for (int t = 0; t < 2000; ++t) {
    std::vector<i64> counts;
    i64 mx = 0;
    const int g = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < g; ++i) {
      counts.push_back(count(rng));
      mx = std::max(mx, counts.back());
    }
    CHECK(report_noisy_max(counts, 1.5, rng) >= mx);
  }
}
