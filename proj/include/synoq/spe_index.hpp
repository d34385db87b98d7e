#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "synoq/secure.hpp"
#include "synoq/synopsis.hpp"

namespace synoq {

// Private bin index over a relation sorted by `attr`. Interval i covers the
// half-open position range [lo_i, hi_i) of the sorted data and is guaranteed
// to contain every tuple whose value falls in bin i:
//   hi_i = min(total_len, sum_{k<=i} upper_k)
//   lo_0 = 0, lo_i = sum_{k<i} max(0, lower_k)
struct SpecialIndex {
  std::string attr;
  std::vector<i64> edges;  // bin edges, size bins+1
  std::vector<std::pair<i64, i64>> intervals;
  i64 total_len = 0;

  size_t bins() const { return intervals.size(); }
};

SpecialIndex build_index(const BoundingHistogram& hist, i64 total_len);

// Merged interval [a, b) over all bins intersecting `vals`; nullopt when no
// bin intersects.
std::optional<std::pair<i64, i64>> lookup(const SpecialIndex& index,
                                          const ValueSet& vals);

// Base relation re-sorted on its hottest attribute with the index built from
// the released synopsis. Immutable after build.
struct IndexedStore {
  std::string relation;
  std::string attr;
  Relation sorted;
  SpecialIndex index;
};

IndexedStore build_indexed_store(const Relation& relation,
                                 const Synopsis& synopsis,
                                 const std::string& hottest_attr);

// Index over the result of a selection, derived from a covering 2D pair by
// selective marginal sums; zero privacy cost. `total_len` is the pessimistic
// cardinality of the filtered relation (callers clamp it to the physical
// array length).
SpecialIndex derive_intermediate_index(const BoundingHistogram& pair_hist,
                                       const ValueSet& vals, i64 total_len);

SecureArray idx_acc(ExecutionContext& ctx, const IndexedStore& store,
                    size_t a, size_t b, const std::string& alias = "");

}  // namespace synoq
