#pragma once

#include "synoq/query.hpp"

namespace synoq {

// Canonical (sorted) multiset of result rows.
struct QueryResult {
  std::vector<std::vector<i64>> rows;

  void canonicalize();
  bool operator==(const QueryResult&) const = default;
};

// Direct plaintext relational-algebra evaluation; ground truth for the
// lossless-processing checks. Sums wrap on the 32-bit ring to mirror secure
// semantics; sum/min/max over an empty input yield no rows, counts yield 0.
QueryResult oracle_execute(const LogicalQuery& q, const Database& db);

// Per-step sizes of a basic-operator left-deep execution in the given alias
// order: the padded cartesian size and the true (revealed) match count.
// Used to account for baseline runs too large to materialize.
struct JoinSizeStep {
  i64 cartesian_size = 0;
  i64 true_size = 0;
};
std::vector<JoinSizeStep> simulate_join_sizes(
    const LogicalQuery& q, const Database& db,
    const std::vector<std::string>& order);

// True per-alias selection sizes (after the relation's own filter).
std::map<std::string, i64> filtered_sizes(const LogicalQuery& q,
                                          const Database& db);

}  // namespace synoq
