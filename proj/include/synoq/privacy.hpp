#pragma once

#include <map>
#include <string>
#include <vector>

#include "synoq/common.hpp"

namespace synoq {

struct ComposedPrivacy {
  double epsilon_hat = 0.0;
  double delta_hat = 0.0;
};

// Composed loss of releasing c pairs at (eps, delta) per mechanism:
// eps_hat = 6 * eps * sqrt(c * ln(1/delta)), delta_hat = (c + 1) * delta.
ComposedPrivacy compose_privacy(i64 pair_count, double epsilon, double delta);

enum class LossMode { FlatSynopsis, Advanced, Cdp };

// Cumulative privacy loss as queries accumulate.
//  - FlatSynopsis: constant compose_privacy(pair_count, ...) for all k;
//    queries after the release are post-processing and cost nothing.
//  - Advanced: k-fold advanced composition of a per-query budget,
//    eps*sqrt(2k ln(1/delta)) + k*eps*(e^eps - 1).
//  - Cdp: zCDP approximation with rho = eps^2/2 per query,
//    rho*k + 2*sqrt(rho*k*ln(1/delta)).
std::vector<std::pair<i64, double>> continual_loss_curve(
    i64 query_count, double per_query_epsilon, double per_query_delta,
    LossMode mode, i64 pair_count = 1);

// Per-relation pair counts and composed totals for one engine instance.
struct PrivacyAccount {
  struct Entry {
    i64 pair_count = 0;
    double epsilon = 0.0;
    double delta = 0.0;
    ComposedPrivacy composed;
  };
  std::map<std::string, Entry> relations;

  void record_release(const std::string& relation, i64 pair_count,
                      double epsilon, double delta);
  // Largest composed epsilon across relations (0 when empty).
  double max_epsilon_hat() const;
};

}  // namespace synoq
