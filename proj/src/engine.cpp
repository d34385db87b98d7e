#include "synoq/engine.hpp"

#include <algorithm>
#include <chrono>
#include <set>

namespace synoq {

PlannerInputs EngineCatalog::planner_inputs() const {
  PlannerInputs in;
  in.db = &db;
  in.synopses = &synopses;
  in.stores = &stores;
  in.config = config;
  return in;
}

std::map<std::string, std::vector<AttrPair>> pairs_from_workload(
    const std::vector<LogicalQuery>& workload, const Database& db) {
  struct Cand {
    std::set<std::pair<std::string, std::string>> pairs;  // (ft, j)
    std::set<std::string> single_filters;
    std::set<std::string> single_joins;
  };
  std::map<std::string, Cand> cands;

  for (const LogicalQuery& q : workload) {
    for (const TableRef& t : q.relations) {
      std::set<std::string> filters;
      if (auto it = q.filters.find(t.alias); it != q.filters.end()) {
        for (const AttrCondition& c : it->second.fused().conjuncts) {
          filters.insert(c.attr);
        }
      }
      std::set<std::string> join_keys;
      for (const JoinEdge& e : q.joins) {
        if (e.left_alias == t.alias) join_keys.insert(e.left_attr);
        if (e.right_alias == t.alias) join_keys.insert(e.right_attr);
      }
      Cand& c = cands[t.table];
      if (!filters.empty() && !join_keys.empty()) {
        for (const std::string& f : filters) {
          for (const std::string& j : join_keys) c.pairs.insert({f, j});
        }
      } else if (!filters.empty()) {
        for (const std::string& f : filters) c.single_filters.insert(f);
      } else if (!join_keys.empty()) {
        for (const std::string& j : join_keys) c.single_joins.insert(j);
      }
    }
  }

  std::map<std::string, std::vector<AttrPair>> out;
  for (auto& [table, c] : cands) {
    (void)db.table(table);
    std::vector<AttrPair> pairs;
    for (const auto& [f, j] : c.pairs) {
      pairs.push_back(AttrPair{f, j});
    }
    for (const std::string& f : c.single_filters) {
      const bool covered = std::any_of(
          c.pairs.begin(), c.pairs.end(),
          [&](const auto& p) { return p.first == f; });
      if (!covered) pairs.push_back(AttrPair{f, std::nullopt});
    }
    for (const std::string& j : c.single_joins) {
      const bool covered = std::any_of(
          c.pairs.begin(), c.pairs.end(),
          [&](const auto& p) { return p.second == j; });
      if (!covered) pairs.push_back(AttrPair{std::nullopt, j});
    }
    if (!pairs.empty()) out[table] = std::move(pairs);
  }
  return out;
}

std::map<std::string, std::string> hottest_attrs(
    const std::vector<LogicalQuery>& workload, const Database& db,
    const std::map<std::string, Synopsis>& synopses) {
  std::map<std::string, std::map<std::string, int>> freq;
  for (const LogicalQuery& q : workload) {
    for (const TableRef& t : q.relations) {
      if (auto it = q.filters.find(t.alias); it != q.filters.end()) {
        for (const AttrCondition& c : it->second.fused().conjuncts) {
          ++freq[t.table][c.attr];
        }
      }
    }
  }
  std::map<std::string, std::string> out;
  for (const auto& [table, syn] : synopses) {
    const Relation& rel = db.table(table);
    std::string best;
    int best_freq = -1;
    i64 best_width = 0;
    for (const Column& col : rel.schema.columns) {
      if (!bounding_1d(syn, col.name)) continue;
      const int f = freq.count(table) && freq.at(table).count(col.name)
                        ? freq.at(table).at(col.name)
                        : 0;
      const i64 wdt = col.domain.width();
      if (best.empty() || f > best_freq ||
          (f == best_freq && (wdt < best_width ||
                              (wdt == best_width && col.name < best)))) {
        best = col.name;
        best_freq = f;
        best_width = wdt;
      }
    }
    if (!best.empty()) out[table] = best;
  }
  return out;
}

EngineCatalog build_catalog(Database db, const EngineConfig& config,
                            const std::vector<LogicalQuery>& representative,
                            u64 release_seed) {
  EngineCatalog cat;
  cat.config = config;
  const auto pairs = pairs_from_workload(representative, db);
  u64 idx = 0;
  for (const auto& [table, table_pairs] : pairs) {
    Rng rng = seeded_rng(release_seed + 0x9e3779b97f4a7c15ull * (++idx));
    Synopsis syn = gen_synopsis(table_pairs, db.table(table), config.epsilon,
                                config.delta, config.bins, rng);
    cat.account.record_release(table, static_cast<i64>(table_pairs.size()),
                               config.epsilon, config.delta);
    cat.synopses.emplace(table, std::move(syn));
  }
  const auto hot = hottest_attrs(representative, db, cat.synopses);
  for (const auto& [table, attr] : hot) {
    cat.stores.emplace(table, build_indexed_store(db.table(table),
                                                  cat.synopses.at(table),
                                                  attr));
  }
  cat.db = std::move(db);
  return cat;
}

// ---- Executor --------------------------------------------------------------

namespace {

struct Executor {
  const EngineCatalog& catalog;
  const LogicalQuery& q;
  ExecutionContext& ctx;
  std::vector<NodeReport> reports;
  bool compaction_lossless = true;

  NodeReport& report_for(const PlanNode& node, i64 out_rows,
                         std::vector<i64> in_rows) {
    NodeReport r;
    r.node_id = node.node_id;
    r.op = plan_op_name(node.op);
    r.input_sizes = std::move(in_rows);
    r.output_size = out_rows;
    r.trace_digest = ctx.trace.digest();
    reports.push_back(std::move(r));
    return reports.back();
  }

  SecureArray exec(const PlanNode& node) {
    switch (node.op) {
      case PlanOp::SeqScan: {
        const IndexedStore* store = nullptr;
        if (auto it = catalog.stores.find(node.table);
            it != catalog.stores.end()) {
          store = &it->second;
        }
        SecureArray out = seq_acc(
            ctx, store ? store->sorted : catalog.db.table(node.table),
            node.alias);
        report_for(node, static_cast<i64>(out.rows()),
                   {static_cast<i64>(out.rows())});
        return out;
      }
      case PlanOp::Select: {
        SecureArray in = exec(*node.children[0]);
        SecureArray out =
            select(ctx, in, qualify(node.predicate, node.alias));
        report_for(node, static_cast<i64>(out.rows()),
                   {static_cast<i64>(in.rows())});
        return out;
      }
      case PlanOp::OpSelect: {
        SecureArray in = exec(*node.children[0]);
        SecureArray marked =
            select(ctx, in, qualify(node.predicate, node.alias));
        const i64 m = marked_count(marked);
        SecureArray out = opac(
            ctx, marked,
            std::min<i64>(node.cs, static_cast<i64>(marked.rows())));
        NodeReport& r = report_for(node, static_cast<i64>(out.rows()),
                                   {static_cast<i64>(marked.rows())});
        r.cs_values = {node.cs};
        r.lossless = node.cs >= m;
        compaction_lossless &= r.lossless;
        return out;
      }
      case PlanOp::SpSelect: {
        SecureArray in = exec(*node.children[0]);
        SecureArray marked =
            select(ctx, in, qualify(node.predicate, node.alias));
        const i64 m = marked_count(marked);
        SecureArray out = sp_write_phase(ctx, marked, node.cs);
        NodeReport& r = report_for(node, static_cast<i64>(out.rows()),
                                   {static_cast<i64>(marked.rows())});
        r.cs_values = {node.cs};
        r.lossless = node.cs >= m;
        compaction_lossless &= r.lossless;
        return out;
      }
      case PlanOp::DcSelect: {
        const IndexedStore& store = catalog.stores.at(node.table);
        SecureArray out =
            dc_select(ctx, store, node.alias, node.dc_lo, node.dc_hi,
                      qualify(node.predicate, node.alias), node.dc_refine);
        report_for(node, static_cast<i64>(out.rows()),
                   {node.dc_hi - node.dc_lo});
        return out;
      }
      case PlanOp::Project: {
        SecureArray in = exec(*node.children[0]);
        SecureArray out = project(ctx, in, node.attrs);
        report_for(node, static_cast<i64>(out.rows()),
                   {static_cast<i64>(in.rows())});
        return out;
      }
      case PlanOp::CartesianJoin: {
        SecureArray l = exec(*node.children[0]);
        SecureArray r = exec(*node.children[1]);
        SecureArray out = join_cartesian(ctx, l, r, node.eq_cols);
        report_for(node, static_cast<i64>(out.rows()),
                   {static_cast<i64>(l.rows()), static_cast<i64>(r.rows())});
        return out;
      }
      case PlanOp::MxJoin: {
        SecureArray l = exec(*node.children[0]);
        SecureArray r = exec(*node.children[1]);
        MxJoinResult res = mx_join(ctx, l, r, node.mx);
        NodeReport& rep =
            report_for(node, static_cast<i64>(res.out.rows()),
                       {static_cast<i64>(l.rows()), static_cast<i64>(r.rows())});
        rep.cs_values = res.cs;
        for (size_t i = 0; i < res.cs.size(); ++i) {
          if (res.bucket_marked[i] > res.cs[i]) rep.lossless = false;
        }
        compaction_lossless &= rep.lossless;
        return std::move(res.out);
      }
      case PlanOp::RevealCompact: {
        SecureArray in = exec(*node.children[0]);
        const i64 k = marked_count(in);
        const i64 in_rows = static_cast<i64>(in.rows());
        SecureArray out;
        if (k == in_rows) {
          out = std::move(in);  // revealed size says nothing to compact
        } else {
          out = opac(ctx, in, k);
        }
        NodeReport& r = report_for(node, static_cast<i64>(out.rows()),
                                   {in_rows});
        r.cs_values = {k};
        return out;
      }
      case PlanOp::Distinct: {
        SecureArray in = exec(*node.children[0]);
        SecureArray out = distinct(ctx, in, node.attrs);
        report_for(node, static_cast<i64>(out.rows()),
                   {static_cast<i64>(in.rows())});
        return out;
      }
      case PlanOp::GroupBy: {
        SecureArray in = exec(*node.children[0]);
        SecureArray out =
            group_by_agg(ctx, in, node.attrs, node.agg_kind, node.agg_attr);
        report_for(node, static_cast<i64>(out.rows()),
                   {static_cast<i64>(in.rows())});
        return out;
      }
      case PlanOp::OrderBy: {
        SecureArray in = exec(*node.children[0]);
        SortSpec spec;
        spec.valid_first = true;
        spec.keys.push_back({in.col(node.attrs[0]), true});
        SecureArray out = oblivious_sort(ctx, in, spec, OpTag::Sort);
        report_for(node, static_cast<i64>(out.rows()),
                   {static_cast<i64>(in.rows())});
        return out;
      }
      case PlanOp::Aggregate:
        throw InvalidParameter("aggregate node below the plan root");
    }
    throw InvalidParameter("unknown plan node");
  }
};

std::vector<std::vector<i64>> extract_valid_rows(
    const SecureArray& a, const std::vector<std::string>& columns) {
  std::vector<int> cols;
  for (const std::string& c : columns) cols.push_back(a.col(c));
  std::vector<std::vector<i64>> rows;
  for (size_t r = 0; r < a.rows(); ++r) {
    const bool valid =
        !a.validated || (ExecutionContext::reconstruct(a.ret[r]) & 1u);
    if (!valid) continue;
    std::vector<i64> row;
    row.reserve(cols.size());
    for (int c : cols) {
      row.push_back(static_cast<i64>(
          ExecutionContext::reconstruct(a.cell(r, static_cast<size_t>(c)))));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ExecutionResult execute_plan(const PlanNode& root, const LogicalQuery& q,
                             const EngineCatalog& catalog,
                             ExecutionContext& ctx) {
  Executor ex{catalog, q, ctx, {}, true};
  ExecutionResult result;

  if (root.op == PlanOp::Aggregate) {
    SecureArray in = ex.exec(*root.children[0]);
    AggregateResult agg = aggregate(ctx, in, root.agg_kind, root.agg_attr);
    NodeReport r;
    r.node_id = root.node_id;
    r.op = plan_op_name(root.op);
    r.input_sizes = {static_cast<i64>(in.rows())};
    r.output_size = 1;
    r.trace_digest = ctx.trace.digest();
    ex.reports.push_back(r);

    const u32 count = ExecutionContext::reconstruct(agg.valid_count);
    const u32 value = ExecutionContext::reconstruct(agg.value);
    switch (root.agg_kind) {
      case AggKind::Count:
      case AggKind::CountDistinct:
        result.result.rows.push_back({static_cast<i64>(value)});
        break;
      default:
        if (count > 0) {
          result.result.rows.push_back({static_cast<i64>(value)});
        }
        break;
    }
  } else {
    SecureArray out = ex.exec(root);
    std::vector<std::string> columns;
    if (q.agg.group_by) {
      columns = {*q.agg.group_by, agg_column_name()};
    } else {
      columns = q.select_columns;
    }
    result.result.rows = extract_valid_rows(out, columns);
  }
  result.result.canonicalize();

  result.reports = std::move(ex.reports);
  result.compaction_lossless = ex.compaction_lossless;
  for (const NodeReport& r : result.reports) {
    result.total_intermediate += r.output_size;
  }
  result.trace_len = ctx.trace.size();
  result.trace_digest = ctx.trace.digest();
  result.gate_count = ctx.stats.gate_count;
  result.peak_cells = ctx.stats.cells_allocated;
  return result;
}

// ---- Analytic accounting for capped baseline runs --------------------------

namespace {

void plan_leaf_order(const PlanNode& node, std::vector<std::string>& order) {
  if (node.op == PlanOp::SeqScan || node.op == PlanOp::DcSelect) {
    if (!node.alias.empty()) order.push_back(node.alias);
  }
  for (const PlanPtr& c : node.children) plan_leaf_order(*c, order);
}

// Mirrors the executed node accounting for a reactive-mode plan that could
// not materialize: scans and selects at full size, reveal-compactions at the
// true size, joins at the product of compacted inputs.
i64 simulate_reactive_intermediate(const LogicalQuery& q, const Database& db,
                                   const PlanNode& root) {
  std::vector<std::string> order;  // DFS, left subtree first = join order
  plan_leaf_order(root, order);

  const auto fsizes = filtered_sizes(q, db);
  const auto steps = simulate_join_sizes(q, db, order);

  i64 total = 0;
  auto leaf_total = [&](const std::string& alias) {
    const TableRef* t = q.find_alias(alias);
    const i64 n = static_cast<i64>(db.table(t->table).row_count());
    const bool has_pred =
        q.filters.count(alias) && !q.filters.at(alias).conjuncts.empty();
    i64 sum = n;  // scan
    if (has_pred) sum += n;  // select
    sum += has_pred ? fsizes.at(alias) : n;  // reveal compaction
    return sum;
  };
  total += leaf_total(order[0]);
  i64 prefix_true = fsizes.at(order[0]);
  for (size_t k = 1; k < order.size(); ++k) {
    total += leaf_total(order[k]);
    const i64 leaf_out = fsizes.at(order[k]);
    total += prefix_true * leaf_out;     // cartesian join output
    prefix_true = steps[k - 1].true_size;
    total += prefix_true;                // reveal compaction
  }
  // aggregation suffix mirrors finish_with_aggregation
  switch (q.agg.kind) {
    case AggKind::None:
      break;
    case AggKind::Count:
      if (q.agg.group_by) {
        total += prefix_true;                       // group_by
        if (q.agg.order_by_agg) total += prefix_true;  // order_by
      } else {
        total += 1;
      }
      break;
    case AggKind::CountDistinct:
      total += prefix_true + 1;
      break;
    default:
      total += 1;
      break;
  }
  return total;
}

u64 count_nodes(const PlanNode& node) {
  u64 n = 1;
  for (const PlanPtr& c : node.children) n += count_nodes(*c);
  return n;
}

}  // namespace

RunOutcome run_query(const EngineCatalog& catalog, const LogicalQuery& q,
                     const std::string& name, PlanMode mode, u64 seed,
                     bool verify, bool keep_trace_events) {
  RunOutcome outcome;
  outcome.metrics.query = name;
  outcome.metrics.mode = plan_mode_name(mode);
  outcome.metrics.seed = seed;

  outcome.plan = plan_query(q, catalog.planner_inputs(), mode, seed);

  ExecutionContext ctx(seed ^ 0xD1B54A32D192ED03ull, catalog.config.join_cap);
  ctx.trace.keep_events = keep_trace_events;

  const auto start = std::chrono::steady_clock::now();
  try {
    ExecutionResult er = execute_plan(*outcome.plan, q, catalog, ctx);
    outcome.metrics.executed = true;
    outcome.metrics.total_intermediate = er.total_intermediate;
    outcome.metrics.operator_count = er.reports.size();
    outcome.metrics.trace_len = er.trace_len;
    outcome.metrics.trace_digest = er.trace_digest;
    outcome.metrics.gate_count = er.gate_count;
    outcome.metrics.peak_cells = er.peak_cells;
    outcome.result = std::move(er.result);
    outcome.reports = std::move(er.reports);
    if (verify) {
      const QueryResult truth = oracle_execute(q, catalog.db);
      outcome.metrics.verified = true;
      outcome.metrics.lossless =
          outcome.result == truth && er.compaction_lossless;
      if (!outcome.metrics.lossless) {
        outcome.metrics.note = "result differs from plaintext oracle";
      }
    }
  } catch (const JoinCapExceeded& e) {
    outcome.metrics.executed = false;
    outcome.metrics.note = e.what();
    outcome.metrics.operator_count = count_nodes(*outcome.plan);
    if (mode == PlanMode::Reactive) {
      outcome.metrics.total_intermediate =
          simulate_reactive_intermediate(q, catalog.db, *outcome.plan);
    } else {
      // basic-operator sizes are data independent: the estimate is exact
      outcome.metrics.total_intermediate =
          plan_estimated_intermediate(*outcome.plan);
    }
  }
  const auto end = std::chrono::steady_clock::now();
  outcome.metrics.wall_ms =
      std::chrono::duration<double, std::milli>(end - start).count();
  return outcome;
}

// ---- Benchmark workload ------------------------------------------------------

const std::vector<std::pair<std::string, std::string>>& benchmark_workload() {
  static const std::vector<std::pair<std::string, std::string>> workload = {
      {"q1", "SELECT * FROM financial.loan WHERE financial.loan.duration = 36;"},
      {"q2",
       "SELECT * FROM financial.order WHERE financial.order.amount > 10000 "
       "and financial.order.amount < 20000 and financial.order.k_symbol = "
       "'LEASING';"},
      {"q3",
       "SELECT count(distinct b.account_id) FROM financial.client a, "
       "financial.disp b where a.client_id = b.client_id and a.district_id = "
       "18 and b.type = 'DISPONENT';"},
      {"q4",
       "SELECT a.date, count(a.date) FROM financial.account a, "
       "financial.trans b where a.account_id = b.account_id and b.operation "
       "= 'VYBER KARTOU' and a.district_id = 18 group by a.date order by "
       "count(a.date);"},
      {"q5",
       "SELECT count(distinct a.account_id) FROM financial.account a, "
       "financial.trans b, financial.order c where a.account_id = "
       "b.account_id and a.account_id = c.account_id and b.operation = "
       "'VYBER KARTOU' and a.district_id = 18 and c.k_symbol = 'LEASING';"},
      {"q6",
       "SELECT sum(a.amount) FROM financial.order a, financial.trans b, "
       "financial.disp c where a.account_id = b.account_id and b.account_id "
       "= c.account_id and b.operation = 'VYBER KARTOU' and a.k_symbol = "
       "'LEASING';"},
      {"q7",
       "SELECT min(c.amount) FROM financial.account a, financial.trans b, "
       "financial.order c, financial.disp d where a.account_id = "
       "b.account_id and a.account_id = d.account_id and c.account_id = "
       "d.account_id and b.operation = 'VYBER KARTOU' and a.district_id = 18 "
       "and c.k_symbol = 'LEASING';"},
      {"q8",
       "SELECT max(c.amount) FROM financial.account a, financial.trans b, "
       "financial.order c, financial.disp d, financial.loan e where "
       "a.account_id = b.account_id and b.account_id = c.account_id and "
       "c.account_id = d.account_id and b.operation = 'VYBER KARTOU' and "
       "c.k_symbol = 'LEASING' and a.district_id = 18 and e.duration = 36;"},
  };
  return workload;
}

std::vector<std::string> representative_statements() {
  std::vector<std::string> out;
  for (const auto& [name, sql] : benchmark_workload()) {
    if (name == "q2" || name == "q4" || name == "q8") out.push_back(sql);
  }
  return out;
}

std::vector<RunMetrics> run_benchmark(const EngineCatalog& catalog,
                                      const std::vector<std::string>& suite,
                                      const std::vector<PlanMode>& modes,
                                      const std::vector<u64>& seeds) {
  std::vector<RunMetrics> out;
  for (const auto& [name, sql] : benchmark_workload()) {
    if (std::find(suite.begin(), suite.end(), name) == suite.end()) continue;
    const LogicalQuery q = parse_query(sql, catalog.db);
    for (PlanMode mode : modes) {
      for (u64 seed : seeds) {
        try {
          RunOutcome r = run_query(catalog, q, name, mode, seed, true);
          out.push_back(r.metrics);
        } catch (const std::exception& e) {
          RunMetrics m;
          m.query = name;
          m.mode = plan_mode_name(mode);
          m.seed = seed;
          m.executed = false;
          m.note = e.what();
          out.push_back(m);
        }
      }
    }
  }
  return out;
}

nlohmann::json metrics_to_json(const std::vector<RunMetrics>& metrics) {
  nlohmann::json arr = nlohmann::json::array();
  for (const RunMetrics& m : metrics) {
    arr.push_back({{"query", m.query},
                   {"mode", m.mode},
                   {"seed", m.seed},
                   {"executed", m.executed},
                   {"verified", m.verified},
                   {"lossless", m.lossless},
                   {"total_intermediate", m.total_intermediate},
                   {"operator_count", m.operator_count},
                   {"trace_len", m.trace_len},
                   {"trace_digest", m.trace_digest},
                   {"gate_count", m.gate_count},
                   {"cells_allocated", m.peak_cells},
                   {"wall_ms", m.wall_ms},
                   {"note", m.note}});
  }
  return arr;
}

nlohmann::json reports_to_json(const std::vector<NodeReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const NodeReport& r : reports) {
    arr.push_back({{"node_id", r.node_id},
                   {"op", r.op},
                   {"input_sizes", r.input_sizes},
                   {"output_size", r.output_size},
                   {"cs_values", r.cs_values},
                   {"lossless_flag", r.lossless},
                   {"trace_digest", r.trace_digest}});
  }
  return arr;
}

nlohmann::json privacy_report(const EngineCatalog& catalog, i64 k,
                              bool include_cdp) {
  nlohmann::json doc;
  for (const auto& [name, e] : catalog.account.relations) {
    doc["relations"][name] = {{"pairs", e.pair_count},
                              {"epsilon", e.epsilon},
                              {"delta", e.delta},
                              {"epsilon_hat", e.composed.epsilon_hat},
                              {"delta_hat", e.composed.delta_hat}};
  }
  const double eps = catalog.config.epsilon;
  const double delta = catalog.config.delta;
  const double flat = catalog.account.relations.empty()
                          ? compose_privacy(1, eps, delta).epsilon_hat
                          : catalog.account.max_epsilon_hat();
  const auto advanced =
      continual_loss_curve(k, eps, delta, LossMode::Advanced);
  doc["flat_epsilon"] = flat;
  nlohmann::json curves;
  nlohmann::json flat_curve = nlohmann::json::array();
  nlohmann::json adv_curve = nlohmann::json::array();
  for (const auto& [kk, v] : advanced) {
    flat_curve.push_back({kk, flat});
    adv_curve.push_back({kk, v});
  }
  curves["flat_synopsis"] = flat_curve;
  curves["advanced_per_query"] = adv_curve;
  if (include_cdp) {
    nlohmann::json cdp_curve = nlohmann::json::array();
    for (const auto& [kk, v] :
         continual_loss_curve(k, eps, delta, LossMode::Cdp)) {
      cdp_curve.push_back({kk, v});
    }
    curves["cdp_per_query_approx"] = cdp_curve;
  }
  doc["curves"] = curves;
  doc["advanced_at_k"] = advanced.back().second;
  doc["ratio_at_k"] = advanced.back().second / flat;
  doc["k"] = k;
  return doc;
}

nlohmann::json synopsis_to_json(const Synopsis& s) {
  nlohmann::json doc;
  doc["relation"] = s.relation;
  doc["epsilon"] = s.epsilon;
  doc["delta"] = s.delta;
  nlohmann::json entries = nlohmann::json::array();
  for (const SynopsisEntry& e : s.entries) {
    nlohmann::json je;
    je["pair"] = {
        {"ft", e.pair.filter_attr ? nlohmann::json(*e.pair.filter_attr)
                                  : nlohmann::json()},
        {"j", e.pair.join_attr ? nlohmann::json(*e.pair.join_attr)
                               : nlohmann::json()}};
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& axis_edges : e.hist.upper.edges) edges.push_back(axis_edges);
    je["bins"] = {{"edges", edges}};
    je["upper"] = e.hist.upper.counts;
    je["lower"] = e.hist.lower.counts;
    je["mf"] = {{"per_bin", e.mf.per_bin},
                {"global", e.mf.global ? nlohmann::json(*e.mf.global)
                                       : nlohmann::json()}};
    entries.push_back(je);
  }
  doc["entries"] = entries;
  return doc;
}

Synopsis synopsis_from_json(const nlohmann::json& j) {
  Synopsis s;
  s.relation = j.at("relation").get<std::string>();
  s.epsilon = j.at("epsilon").get<double>();
  s.delta = j.at("delta").get<double>();
  for (const nlohmann::json& je : j.at("entries")) {
    SynopsisEntry e;
    if (!je.at("pair").at("ft").is_null()) {
      e.pair.filter_attr = je.at("pair").at("ft").get<std::string>();
    }
    if (!je.at("pair").at("j").is_null()) {
      e.pair.join_attr = je.at("pair").at("j").get<std::string>();
    }
    const auto axes = e.pair.attrs();
    for (Histogram* h : {&e.hist.upper, &e.hist.lower}) {
      h->axes = axes;
      for (const nlohmann::json& edges : je.at("bins").at("edges")) {
        h->edges.push_back(edges.get<std::vector<i64>>());
      }
    }
    e.hist.upper.counts = je.at("upper").get<std::vector<i64>>();
    e.hist.lower.counts = je.at("lower").get<std::vector<i64>>();
    e.mf.per_bin = je.at("mf").at("per_bin").get<std::vector<i64>>();
    if (!je.at("mf").at("global").is_null()) {
      e.mf.global = je.at("mf").at("global").get<i64>();
    }
    if (e.pair.join_attr) e.mf.join_attr = *e.pair.join_attr;
    s.entries.push_back(std::move(e));
  }
  return s;
}

nlohmann::json index_to_json(const SpecialIndex& idx) {
  nlohmann::json doc;
  doc["attr"] = idx.attr;
  doc["edges"] = idx.edges;
  nlohmann::json intervals = nlohmann::json::array();
  for (const auto& [lo, hi] : idx.intervals) {
    intervals.push_back({lo, hi});
  }
  doc["intervals"] = intervals;
  doc["total_len"] = idx.total_len;
  return doc;
}

}  // namespace synoq
