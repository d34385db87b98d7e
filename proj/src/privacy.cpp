#include "synoq/privacy.hpp"

#include <algorithm>
#include <cmath>

namespace synoq {

ComposedPrivacy compose_privacy(i64 pair_count, double epsilon, double delta) {
  if (pair_count < 1) throw InvalidParameter("pair count must be >= 1");
  if (!(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0)) {
    throw InvalidParameter("compose_privacy needs eps > 0 and delta in (0,1)");
  }
  ComposedPrivacy out;
  out.epsilon_hat =
      6.0 * epsilon * std::sqrt(static_cast<double>(pair_count) *
                                std::log(1.0 / delta));
  out.delta_hat = static_cast<double>(pair_count + 1) * delta;
  return out;
}

std::vector<std::pair<i64, double>> continual_loss_curve(
    i64 query_count, double per_query_epsilon, double per_query_delta,
    LossMode mode, i64 pair_count) {
  if (query_count < 1) throw InvalidParameter("query count must be >= 1");
  std::vector<std::pair<i64, double>> curve;
  curve.reserve(static_cast<size_t>(query_count));
  const double eps = per_query_epsilon;
  const double ln_inv_delta = std::log(1.0 / per_query_delta);
  const double flat =
      compose_privacy(pair_count, eps, per_query_delta).epsilon_hat;
  for (i64 k = 1; k <= query_count; ++k) {
    double total = 0.0;
    switch (mode) {
      case LossMode::FlatSynopsis:
        total = flat;
        break;
      case LossMode::Advanced:
        total = eps * std::sqrt(2.0 * static_cast<double>(k) * ln_inv_delta) +
                static_cast<double>(k) * eps * (std::exp(eps) - 1.0);
        break;
      case LossMode::Cdp: {
        // Approximation: the source material does not print its CDP formula.
        const double rho = eps * eps / 2.0;
        total = rho * static_cast<double>(k) +
                2.0 * std::sqrt(rho * static_cast<double>(k) * ln_inv_delta);
        break;
      }
    }
    curve.emplace_back(k, total);
  }
  return curve;
}

void PrivacyAccount::record_release(const std::string& relation,
                                    i64 pair_count, double epsilon,
                                    double delta) {
  Entry e;
  e.pair_count = pair_count;
  e.epsilon = epsilon;
  e.delta = delta;
  e.composed = compose_privacy(pair_count, epsilon, delta);
  relations[relation] = e;
}

double PrivacyAccount::max_epsilon_hat() const {
  double best = 0.0;
  for (const auto& [name, e] : relations) {
    best = std::max(best, e.composed.epsilon_hat);
  }
  return best;
}

}  // namespace synoq
