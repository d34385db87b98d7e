#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "synoq/query.hpp"
#include "synoq/secure.hpp"
#include "synoq/spe_index.hpp"

namespace synoq {

// Filter: recomputes every ret bit in one oblivious pass. On a validated
// array the predicate ANDs into the existing bit (the single composition
// rule, which also serves refinement after indexed access); on a fresh load
// it assigns the bit.
SecureArray select(ExecutionContext& ctx, const SecureArray& input,
                   const Predicate& predicate);

// Column restriction; server-local, ret always survives.
SecureArray project(ExecutionContext& ctx, const SecureArray& input,
                    const std::vector<std::string>& attrs);

// Cartesian product padded to |a| * |b| rows. Output ret is the AND of both
// effective ret bits and every column equality in `eqs` (pairs of column
// names from a and b respectively).
SecureArray join_cartesian(
    ExecutionContext& ctx, const SecureArray& a, const SecureArray& b,
    const std::vector<std::pair<std::string, std::string>>& eqs);

struct AggregateResult {
  SecureValue value;
  SecureValue valid_count;  // number of contributing tuples
};

AggregateResult aggregate(ExecutionContext& ctx, const SecureArray& input,
                          AggKind kind, const std::string& attr);

// Oblivious sort by `attrs` (valid tuples first), then a linear pass that
// leaves ret = 1 exactly on the last tuple of each equal run among
// previously-valid tuples.
SecureArray distinct(ExecutionContext& ctx, const SecureArray& input,
                     const std::vector<std::string>& attrs);

// Distinct plus an appended aggregate column (named `agg_column_name()`),
// dummy-valued (-1 encoded) on non-representative rows.
SecureArray group_by_agg(ExecutionContext& ctx, const SecureArray& input,
                         const std::vector<std::string>& keys, AggKind agg,
                         const std::string& agg_attr);
const std::string& agg_column_name();

// Select followed by oblivious compaction to the pessimistic cardinality
// `cs` (from card_est); lossless because cs never underestimates.
SecureArray op_select(ExecutionContext& ctx, const SecureArray& input,
                      const Predicate& predicate, i64 cs);

// Two linear scans writing marked tuples into a cs-sized output; every input
// tuple triggers one write event per output slot so actual and dummy writes
// are indistinguishable in the trace.
SecureArray sp_select(ExecutionContext& ctx, const SecureArray& input,
                      const Predicate& predicate, i64 cs);
// The second scan alone, over an already-marked array.
SecureArray sp_write_phase(ExecutionContext& ctx, const SecureArray& marked,
                           i64 cs);

// Indexed access of the merged interval [a, b) followed by an in-memory
// refinement pass (bin granularity admits false positives; the pass is
// skipped only when the predicate covers the whole domain).
SecureArray dc_select(ExecutionContext& ctx, const IndexedStore& store,
                      const std::string& alias, i64 a, i64 b,
                      const Predicate& qualified_predicate, bool refine);

// ---- Bucketized MF-bound join ---------------------------------------------

struct MxSideParams {
  std::string key_col;  // qualified column carrying the bucket key
  i64 mf_hat = 1;
  std::vector<std::pair<i64, i64>> intervals;  // per-bucket slice [lo, hi)
  bool presorted = false;  // skip the oblivious key sort
};

struct MxJoinParams {
  std::string join_attr;      // unqualified attribute name
  std::vector<i64> bin_edges;  // shared bucket edges (size buckets+1)
  MxSideParams left, right;
  // Per-bucket compaction bound: min(w_l * mf_r, w_r * mf_l, w_l * w_r).
  std::vector<i64> cs;
  // All equality edges between the two sides (qualified column names).
  std::vector<std::pair<std::string, std::string>> eq_cols;
};

// Per-bucket output bounds for the given slice widths and MF estimates.
std::vector<i64> mx_bucket_bounds(const MxJoinParams& params);

struct JoinAnnotation {
  std::string join_attr;
  std::vector<std::string> key_cols;  // columns equal on valid rows
  bool mf_ready = false;
  i64 mf_hat = 0;
  std::vector<i64> bin_edges;
  std::vector<std::pair<i64, i64>> intervals;  // output bucket extents
};

struct MxJoinResult {
  SecureArray out;
  JoinAnnotation annotation;
  std::vector<i64> cs;
  // Simulation-side accounting: true per-bucket match counts, for lossless
  // reporting only.
  std::vector<i64> bucket_marked;
};

// Bucketized join: sorts unsorted inputs on the join key (valid tuples
// first), joins per-bucket slices with the bucket's bin-membership predicate
// (which prevents duplicates across overlapping slices), compacts each
// bucket to its MF bound and concatenates in bin order. The output is
// MF-and-index-ready on the join attribute.
MxJoinResult mx_join(ExecutionContext& ctx, const SecureArray& left,
                     const SecureArray& right, const MxJoinParams& params);

// Qualify a relation-scoped predicate's attribute names with an alias.
Predicate qualify(const Predicate& predicate, const std::string& alias);

}  // namespace synoq
