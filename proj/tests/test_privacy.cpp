#include <cmath>

#include "doctest.h"
#include "synoq/privacy.hpp"

using namespace synoq;

TEST_CASE("compose_privacy matches the closed form to 1e-12") {
  const long double eps = 1.5L, delta = 5e-5L;
  for (i64 c : {1, 2, 3, 4, 8, 16}) {
    const ComposedPrivacy p = compose_privacy(c, 1.5, 5e-5);
    const long double expected =
        6.0L * eps * std::sqrt(static_cast<long double>(c) *
                               std::log(1.0L / delta));
    CHECK(std::abs(p.epsilon_hat - static_cast<double>(expected)) <=
          1e-12 * static_cast<double>(expected));
    CHECK(p.delta_hat ==
          doctest::Approx(static_cast<double>((c + 1) * delta)).epsilon(1e-12));
  }
  CHECK(compose_privacy(1, 1.5, 5e-5).epsilon_hat ==
        doctest::Approx(28.32).epsilon(1e-3));
  CHECK(compose_privacy(1, 1.5, 5e-5).delta_hat ==
        doctest::Approx(1e-4).epsilon(1e-12));
}

TEST_CASE("four pairs cost exactly twice one pair") {
  const double e1 = compose_privacy(1, 1.5, 5e-5).epsilon_hat;
  const double e4 = compose_privacy(4, 1.5, 5e-5).epsilon_hat;
  CHECK(e4 == doctest::Approx(2.0 * e1).epsilon(1e-12));
}

TEST_CASE("delta_hat grows linearly in the pair count") {
  for (i64 c = 1; c <= 10; ++c) {
    CHECK(compose_privacy(c, 1.5, 5e-5).delta_hat ==
          doctest::Approx((c + 1) * 5e-5).epsilon(1e-12));
  }
}

TEST_CASE("flat curve is constant; advanced composition blows past 100") {
  const auto flat =
      continual_loss_curve(100, 1.5, 5e-5, LossMode::FlatSynopsis, 2);
  for (const auto& [k, v] : flat) {
    CHECK(v == doctest::Approx(flat.front().second).epsilon(1e-12));
  }
  const auto adv = continual_loss_curve(100, 1.5, 5e-5, LossMode::Advanced);
  CHECK(adv.back().second > 100.0);
  for (size_t i = 1; i < adv.size(); ++i) {
    CHECK(adv[i].second >= adv[i - 1].second);
  }
  // independent evaluation of the k-fold advanced composition total
  const long double eps = 1.5L, delta = 5e-5L, k = 100.0L;
  const long double expected =
      eps * std::sqrt(2.0L * k * std::log(1.0L / delta)) +
      k * eps * (std::exp(eps) - 1.0L);
  CHECK(std::abs(adv.back().second - static_cast<double>(expected)) <=
        1e-12 * static_cast<double>(expected));
}

TEST_CASE("cdp approximation curve is monotone") {
  const auto cdp = continual_loss_curve(50, 1.5, 5e-5, LossMode::Cdp);
  for (size_t i = 1; i < cdp.size(); ++i) {
    CHECK(cdp[i].second >= cdp[i - 1].second);
  }
}

TEST_CASE("privacy account tracks the worst composed relation") {
  PrivacyAccount acc;
  acc.record_release("a", 1, 1.5, 5e-5);
  acc.record_release("b", 2, 1.5, 5e-5);
  CHECK(acc.max_epsilon_hat() ==
        doctest::Approx(compose_privacy(2, 1.5, 5e-5).epsilon_hat));
  CHECK_THROWS_AS(compose_privacy(0, 1.5, 5e-5), InvalidParameter);
}
