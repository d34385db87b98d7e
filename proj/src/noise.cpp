#include "synoq/noise.hpp"

#include <algorithm>
#include <cmath>

namespace synoq {

OneSidedLaplace::OneSidedLaplace(double epsilon, double delta)
    : epsilon_(epsilon), delta_(delta) {
  if (!(epsilon > 0.0)) {
    throw InvalidParameter("one-sided Laplace requires epsilon > 0");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidParameter("one-sided Laplace requires 0 < delta < 1");
  }
  // delta * (e^eps + 1) >= e^eps makes mu <= 0 and voids the delta tail
  // bound, so the parameters are rejected outright.
  const double ee = std::exp(epsilon);
  if (delta * (ee + 1.0) >= ee) {
    throw InvalidParameter(
        "invalid (epsilon, delta): delta * (e^eps + 1) >= e^eps");
  }
  mu_ = 1.0 - std::log(delta * (ee + 1.0)) / epsilon;
  q_ = std::exp(-epsilon);
  const double m = std::floor(mu_);
  const double f = mu_ - m;
  const double z = std::pow(q_, f) + std::pow(q_, 1.0 - f);
  log_z_ = std::log(z);
  left_mass_ = std::pow(q_, f) / z;
}

i64 OneSidedLaplace::raw_draw(Rng& rng) const {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double u = uni(rng);
  while (u <= 0.0 || u >= 1.0) u = uni(rng);
  double x;
  if (u <= left_mass_) {
    x = std::ceil(mu_ + (std::log(u) + log_z_) / epsilon_);
    // Guard against ceil landing one step above the left block.
    x = std::min(x, std::floor(mu_));
  } else {
    x = std::ceil(mu_ - 1.0 + (-std::log(1.0 - u) - log_z_) / epsilon_);
    x = std::max(x, std::floor(mu_) + 1.0);
  }
  return static_cast<i64>(x);
}

i64 OneSidedLaplace::sample(NoiseSign sign, Rng& rng) const {
  const i64 z = raw_draw(rng);
  if (sign == NoiseSign::Positive) return std::max<i64>(0, z);
  // The negative variant centers at -mu; by lattice symmetry that is the
  // negated positive draw.
  return std::min<i64>(0, -z);
}

i64 sample_one_sided_laplace(double epsilon, double delta, NoiseSign sign,
                             Rng& rng) {
  return OneSidedLaplace(epsilon, delta).sample(sign, rng);
}

i64 report_noisy_max(const std::vector<i64>& group_counts, double epsilon,
                     Rng& rng) {
  if (group_counts.empty()) {
    throw InvalidParameter("report_noisy_max over empty group list");
  }
  if (!(epsilon > 0.0)) {
    throw InvalidParameter("report_noisy_max requires epsilon > 0");
  }
  std::exponential_distribution<double> noise(epsilon / 2.0);
  double best = 0.0;
  bool first = true;
  for (i64 c : group_counts) {
    const double noisy = static_cast<double>(c) + noise(rng);
    if (first || noisy > best) best = noisy;
    first = false;
  }
  return static_cast<i64>(std::ceil(best));
}

}  // namespace synoq
