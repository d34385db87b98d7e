#pragma once

#include <vector>

#include "synoq/common.hpp"

namespace synoq {

enum class NoiseSign { Positive, Negative };

// One-sided Laplace sampler on the integer lattice.
//
// The underlying two-sided variable z takes integer values with
// Pr[z = x] proportional to exp(-eps * |x - mu|), where for the positive
// variant mu = 1 - ln(delta * (e^eps + 1)) / eps and the negative variant
// negates mu. The positive sample is max(0, z), the negative min(0, z).
//
// Sampling uses the inverse CDF of the normalized lattice distribution.
// With q = e^-eps, m = floor(mu), f = mu - m and Z = q^f + q^(1-f):
//   for x <= m:  F(x) = q^(mu - x) / Z          (geometric left tail)
//   for x >= m:  1 - F(x) = q^(x + 1 - mu) / Z  (geometric right tail)
// so for u ~ U(0,1), the sample is the smallest integer x with F(x) >= u:
//   u <= F(m):  x = ceil(mu + ln(u * Z) / eps)
//   u >  F(m):  x = ceil(mu - 1 - ln((1 - u) * Z) / eps)
// mu is real-valued; the lattice is centered on it directly and only the
// samples are integers. The clamp max(0, .) folds all mass below zero onto
// zero; the delta tail property Pr[z < 1] <= ~delta is checked empirically.
class OneSidedLaplace {
 public:
  OneSidedLaplace(double epsilon, double delta);

  // Raw two-sided lattice draw around the positive-variant mu (no clamp).
  i64 raw_draw(Rng& rng) const;

  // Clamped one-sided sample: >= 0 for Positive, <= 0 for Negative.
  i64 sample(NoiseSign sign, Rng& rng) const;

  double mu() const { return mu_; }
  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }

 private:
  double epsilon_;
  double delta_;
  double mu_;       // positive-variant center
  double q_;        // e^-eps
  double log_z_;    // ln(q^f + q^(1-f))
  double left_mass_;  // F(floor(mu))
};

i64 sample_one_sided_laplace(double epsilon, double delta, NoiseSign sign,
                             Rng& rng);

// Report-noisy-max: adds i.i.d. Exp(2/eps) noise to every grouped count and
// returns the largest noisy count rounded up. Output never falls below the
// true maximum because exponential noise is nonnegative.
i64 report_noisy_max(const std::vector<i64>& group_counts, double epsilon,
                     Rng& rng);

}  // namespace synoq
