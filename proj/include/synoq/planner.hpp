#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "synoq/config.hpp"
#include "synoq/operators.hpp"
#include "synoq/query.hpp"

namespace synoq {

enum class PlanOp {
  SeqScan,
  Select,
  OpSelect,
  SpSelect,
  DcSelect,
  Project,
  CartesianJoin,
  MxJoin,
  RevealCompact,
  Aggregate,
  Distinct,
  GroupBy,
  OrderBy,
};
const char* plan_op_name(PlanOp op);

struct CostWeights {
  double w_io = 1.0;
  double w_ev = 10.0;
};

struct CostEstimate {
  double c_in = 0.0;
  double c_eval = 0.0;
  double c_out = 0.0;
  double total() const { return c_in + c_eval + c_out; }
};

// Extra shape information some operators' eval terms need.
struct OpCostDetail {
  std::vector<i64> bucket_products;  // mx_join per-bucket slice products
  std::vector<i64> sort_sizes;       // mx_join inputs needing a key sort
};

// Concrete cost functions instantiating the asymptotic table with weights:
// c_in = w_io * sum(in), c_out = w_io * out, and a per-operator eval term
// (linear scans, n log n compaction, n log^2 n sorts, quadratic joins).
// SeqScan is a placeholder (consumers' c_in covers the load); DcSelect pays
// only its indexed input I/O.
CostEstimate op_cost(PlanOp op, const std::vector<i64>& in_sizes, i64 out_size,
                     const CostWeights& weights,
                     const OpCostDetail& detail = {});

struct PlanNode {
  PlanOp op = PlanOp::SeqScan;
  std::vector<std::shared_ptr<PlanNode>> children;
  int node_id = 0;

  // access paths
  std::string alias, table;
  Predicate predicate;  // fused, relation-scoped attribute names
  i64 cs = 0;           // compaction bound for op/sp select
  i64 dc_lo = 0, dc_hi = 0;
  bool dc_refine = true;

  // joins
  std::vector<std::pair<std::string, std::string>> eq_cols;
  MxJoinParams mx;
  JoinAnnotation annotation;

  // aggregation suffix
  AggKind agg_kind = AggKind::None;
  std::string agg_attr;
  std::vector<std::string> attrs;  // distinct / group keys, order-by column

  std::vector<i64> est_in;
  i64 est_out = 0;
  CostEstimate cost;
};

using PlanPtr = std::shared_ptr<PlanNode>;

struct PlannerInputs {
  const Database* db = nullptr;
  const std::map<std::string, Synopsis>* synopses = nullptr;
  const std::map<std::string, IndexedStore>* stores = nullptr;
  EngineConfig config;

  const Synopsis* synopsis_for(const std::string& table) const;
  const IndexedStore* store_for(const std::string& table) const;
};

enum class PlanMode { Special, Exhaustive, Reactive };
PlanMode plan_mode_from_string(const std::string& name);
const char* plan_mode_name(PlanMode mode);

// Special: bottom-up dynamic programming over left-deep join orders with
// fused filter pushdown, access-path choice by cost, and MF-and-index-ready
// propagation keyed per (relation subset, ready attribute). Exhaustive /
// Reactive: seeded random left-deep order over basic operators, without or
// with runtime-revealed compaction.
PlanPtr plan_query(const LogicalQuery& q, const PlannerInputs& inputs,
                   PlanMode mode, u64 order_seed = 0);

double plan_total_cost(const PlanNode& root);
i64 plan_estimated_intermediate(const PlanNode& root);
std::string explain_text(const PlanNode& root);
nlohmann::json explain_json(const PlanNode& root);

// ---- Building blocks shared with the verification enumerator --------------

struct AccessPath {
  PlanPtr node;
  i64 out = 0;          // physical output size
  double cost = 0.0;    // subtree cost
  std::string sig;
  // Set when the path is an unfiltered scan of a store: the store's sort
  // attribute (makes the side pre-sorted for a same-attribute mx_join).
  std::optional<std::string> store_sorted_attr;
};

struct ReadyInfo {
  std::string attr;
  std::vector<std::string> key_cols;
  i64 mf_hat = 0;
  std::vector<i64> bin_edges;
  std::vector<std::pair<i64, i64>> intervals;
};

// Head of a left-deep prefix.
struct LeftState {
  PlanPtr plan;
  i64 out = 0;
  double cost = 0.0;
  std::vector<std::string> placed;
  std::optional<ReadyInfo> ready;
  std::optional<std::string> single_store_sorted_attr;
  std::string sig;
};

std::vector<AccessPath> enumerate_access_paths(const LogicalQuery& q,
                                               const std::string& alias,
                                               const PlannerInputs& inputs);
LeftState initial_state(const AccessPath& path, const std::string& alias);
// Every way to join `alias` (through the given access path) onto the prefix.
std::vector<LeftState> extend_state(const LogicalQuery& q,
                                    const PlannerInputs& inputs,
                                    const LeftState& left,
                                    const AccessPath& leaf,
                                    const std::string& alias);
// Appends the aggregation suffix and returns the completed plan.
LeftState finish_with_aggregation(const LogicalQuery& q,
                                  const PlannerInputs& inputs,
                                  LeftState state);

double lg2(i64 n);

}  // namespace synoq
