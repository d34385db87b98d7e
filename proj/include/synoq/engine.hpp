#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "synoq/oracle.hpp"
#include "synoq/parser.hpp"
#include "synoq/planner.hpp"
#include "synoq/privacy.hpp"
#include "synoq/spe_index.hpp"

namespace synoq {

// Everything a running engine instance holds: data, released synopses,
// indexed stores and the privacy ledger.
struct EngineCatalog {
  Database db;
  EngineConfig config;
  std::map<std::string, Synopsis> synopses;
  std::map<std::string, IndexedStore> stores;
  PrivacyAccount account;

  PlannerInputs planner_inputs() const;
};

// Representative-pair selection: 2-way (filter attr, join attr) combinations
// seen in the workload per relation, plus individual attributes not covered
// by any pair.
std::map<std::string, std::vector<AttrPair>> pairs_from_workload(
    const std::vector<LogicalQuery>& workload, const Database& db);

// Hottest attribute per relation: most frequent filter attribute in the
// workload (ties to the smaller domain), restricted to synopsis-covered
// attributes. Relations without coverage get no store.
std::map<std::string, std::string> hottest_attrs(
    const std::vector<LogicalQuery>& workload, const Database& db,
    const std::map<std::string, Synopsis>& synopses);

// One-time release: synopses for every relation with representative pairs,
// privacy accounting, and indexed stores over the hottest attributes.
EngineCatalog build_catalog(Database db, const EngineConfig& config,
                            const std::vector<LogicalQuery>& representative,
                            u64 release_seed);

// ---- Execution -------------------------------------------------------------

struct NodeReport {
  int node_id = 0;
  std::string op;
  std::vector<i64> input_sizes;
  i64 output_size = 0;
  std::vector<i64> cs_values;
  bool lossless = true;
  u64 trace_digest = 0;
};

struct ExecutionResult {
  QueryResult result;
  std::vector<NodeReport> reports;
  bool compaction_lossless = true;
  i64 total_intermediate = 0;
  u64 trace_len = 0;
  u64 trace_digest = 0;
  u64 gate_count = 0;
  u64 peak_cells = 0;
};

ExecutionResult execute_plan(const PlanNode& root, const LogicalQuery& q,
                             const EngineCatalog& catalog,
                             ExecutionContext& ctx);

// ---- Benchmark harness -----------------------------------------------------

struct RunMetrics {
  std::string query;
  std::string mode;
  u64 seed = 0;
  bool executed = true;
  bool verified = false;
  bool lossless = false;
  i64 total_intermediate = 0;
  u64 operator_count = 0;
  u64 trace_len = 0;
  u64 trace_digest = 0;
  u64 gate_count = 0;
  u64 peak_cells = 0;
  double wall_ms = 0.0;
  std::string note;
};

struct RunOutcome {
  RunMetrics metrics;
  QueryResult result;
  PlanPtr plan;
  std::vector<NodeReport> reports;
};

// Plans and executes one query. Baseline runs whose materialization exceeds
// the engine cap are accounted analytically (executed = false) instead of
// failing the benchmark. `verify` compares against the plaintext oracle.
RunOutcome run_query(const EngineCatalog& catalog, const LogicalQuery& q,
                     const std::string& name, PlanMode mode, u64 seed,
                     bool verify, bool keep_trace_events = false);

// Named benchmark workload (q1..q8) and the default representative subset.
const std::vector<std::pair<std::string, std::string>>& benchmark_workload();
std::vector<std::string> representative_statements();

std::vector<RunMetrics> run_benchmark(const EngineCatalog& catalog,
                                      const std::vector<std::string>& suite,
                                      const std::vector<PlanMode>& modes,
                                      const std::vector<u64>& seeds);

nlohmann::json metrics_to_json(const std::vector<RunMetrics>& metrics);
nlohmann::json reports_to_json(const std::vector<NodeReport>& reports);

// Per-relation composed loss, the flat curve, the per-query composition
// curves at k points, and the ratio at k.
nlohmann::json privacy_report(const EngineCatalog& catalog, i64 k,
                              bool include_cdp);

// JSON serialization of released synopses / indexes (external formats).
nlohmann::json synopsis_to_json(const Synopsis& s);
Synopsis synopsis_from_json(const nlohmann::json& j);
nlohmann::json index_to_json(const SpecialIndex& idx);

}  // namespace synoq
