#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "synoq/histogram.hpp"
#include "synoq/noise.hpp"

namespace synoq {

// Representative attribute pair: a frequently queried filter attribute, a
// join key, or both. At least one side is present.
struct AttrPair {
  std::optional<std::string> filter_attr;
  std::optional<std::string> join_attr;

  bool valid() const { return filter_attr.has_value() || join_attr.has_value(); }
  std::vector<std::string> attrs() const;
  bool operator==(const AttrPair&) const = default;
};

// Noisy max-frequency table for a join attribute: one entry per filter-attr
// bin when the pair has a filter side, a single global entry otherwise.
struct MFTable {
  std::string join_attr;
  std::vector<i64> per_bin;
  std::optional<i64> global;

  bool empty() const { return per_bin.empty() && !global.has_value(); }
};

struct SynopsisEntry {
  AttrPair pair;
  BoundingHistogram hist;
  MFTable mf;
};

// One-time DP release for a relation: bounding histograms plus MF tables for
// every configured representative pair, and the per-mechanism (eps, delta)
// spent to produce them.
struct Synopsis {
  std::string relation;
  double epsilon = 0.0;
  double delta = 0.0;
  std::vector<SynopsisEntry> entries;

  const SynopsisEntry* find_pair(const std::optional<std::string>& ft,
                                 const std::optional<std::string>& j) const;
  // Any entry whose pair mentions `attr` (1D preferred over 2D).
  const SynopsisEntry* covering(const std::string& attr) const;
};

// DP synopsis generation: exact histogram per pair, one-sided noise per bin
// (independent draws per bin per histogram), and noisy MF tables for join
// attributes. Unique-valued join keys short-circuit every MF entry to 1;
// empty filter partitions record 0 (the tight bound for an empty subset).
Synopsis gen_synopsis(const std::vector<AttrPair>& pairs,
                      const Relation& relation, double epsilon, double delta,
                      size_t bins_per_axis, Rng& rng);

// Join-key MF of the pre-filtered relation: sums per-bin MFs over filter
// bins intersecting `vals`, capped by the global MF when one is known
// (either stored in the entry or supplied from a standalone release).
i64 filtered_mf(const SynopsisEntry& entry, const ValueSet& vals,
                std::optional<i64> standalone_global = std::nullopt);

// 1D upper histogram of `attr` for the relation, direct or via marginal
// sums of a covering 2D pair. Empty when the synopsis does not cover it.
std::optional<BoundingHistogram> bounding_1d(const Synopsis& synopsis,
                                             const std::string& attr);

// Pessimistic cardinality of a selection: min over conjunct attributes of
// the intersecting upper-histogram mass, clamped to [0, n]; n when the
// synopsis covers none of the attributes.
struct AttrCondition {
  std::string attr;
  ValueSet vals;
};
i64 card_est(i64 relation_size, const std::vector<AttrCondition>& conjuncts,
             const Synopsis* synopsis);

}  // namespace synoq
