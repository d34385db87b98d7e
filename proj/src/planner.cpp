#include "synoq/planner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace synoq {

const char* plan_op_name(PlanOp op) {
  switch (op) {
    case PlanOp::SeqScan: return "seq_scan";
    case PlanOp::Select: return "select";
    case PlanOp::OpSelect: return "op_select";
    case PlanOp::SpSelect: return "sp_select";
    case PlanOp::DcSelect: return "dc_select";
    case PlanOp::Project: return "project";
    case PlanOp::CartesianJoin: return "join";
    case PlanOp::MxJoin: return "mx_join";
    case PlanOp::RevealCompact: return "reveal_compact";
    case PlanOp::Aggregate: return "aggregate";
    case PlanOp::Distinct: return "distinct";
    case PlanOp::GroupBy: return "group_by";
    case PlanOp::OrderBy: return "order_by";
  }
  return "?";
}

PlanMode plan_mode_from_string(const std::string& name) {
  if (name == "special") return PlanMode::Special;
  if (name == "exhaustive") return PlanMode::Exhaustive;
  if (name == "reactive") return PlanMode::Reactive;
  throw InvalidParameter("unknown mode '" + name + "'");
}

const char* plan_mode_name(PlanMode mode) {
  switch (mode) {
    case PlanMode::Special: return "special";
    case PlanMode::Exhaustive: return "exhaustive";
    case PlanMode::Reactive: return "reactive";
  }
  return "?";
}

const Synopsis* PlannerInputs::synopsis_for(const std::string& table) const {
  if (!synopses) return nullptr;
  auto it = synopses->find(table);
  return it == synopses->end() ? nullptr : &it->second;
}

const IndexedStore* PlannerInputs::store_for(const std::string& table) const {
  if (!stores) return nullptr;
  auto it = stores->find(table);
  return it == stores->end() ? nullptr : &it->second;
}

double lg2(i64 n) { return std::log2(static_cast<double>(std::max<i64>(n, 2))); }

namespace {

i64 sat_mul(i64 a, i64 b) {
  constexpr i64 kCap = i64{4} << 60;
  if (a > 0 && b > 0 && a > kCap / b) return kCap;
  return a * b;
}

double sum_sizes(const std::vector<i64>& sizes) {
  double s = 0.0;
  for (i64 v : sizes) s += static_cast<double>(v);
  return s;
}

}  // namespace

CostEstimate op_cost(PlanOp op, const std::vector<i64>& in_sizes, i64 out_size,
                     const CostWeights& w, const OpCostDetail& detail) {
  CostEstimate c;
  c.c_in = w.w_io * sum_sizes(in_sizes);
  c.c_out = w.w_io * static_cast<double>(out_size);
  const double n = sum_sizes(in_sizes);
  switch (op) {
    case PlanOp::SeqScan:
      // Placeholder access node: consumers' input I/O pays for the load.
      c.c_in = 0.0;
      c.c_out = 0.0;
      break;
    case PlanOp::Select:
      c.c_eval = w.w_ev * n;
      break;
    case PlanOp::OpSelect:
      c.c_eval = w.w_ev * n * lg2(static_cast<i64>(n));
      break;
    case PlanOp::SpSelect:
      c.c_eval = w.w_ev * n;
      break;
    case PlanOp::DcSelect:
      // Indexed load: input I/O is the interval width, no secure eval and no
      // separate result write-back.
      c.c_eval = 0.0;
      c.c_out = 0.0;
      break;
    case PlanOp::Project:
      c.c_eval = 0.0;
      break;
    case PlanOp::CartesianJoin: {
      if (in_sizes.size() != 2) throw InvalidParameter("join needs two inputs");
      c.c_eval = w.w_ev * static_cast<double>(in_sizes[0]) *
                 static_cast<double>(in_sizes[1]);
      break;
    }
    case PlanOp::MxJoin: {
      double eval = 0.0;
      for (i64 p : detail.bucket_products) eval += static_cast<double>(p);
      for (i64 s : detail.sort_sizes) {
        eval += static_cast<double>(s) * lg2(s) * lg2(s);
      }
      c.c_eval = w.w_ev * eval;
      break;
    }
    case PlanOp::RevealCompact:
      c.c_eval = w.w_ev * n * lg2(static_cast<i64>(n));
      break;
    case PlanOp::Aggregate:
      c.c_eval = w.w_ev * n;
      c.c_out = w.w_io * 1.0;
      break;
    case PlanOp::Distinct:
    case PlanOp::GroupBy:
    case PlanOp::OrderBy:
      c.c_eval = w.w_ev * n * lg2(static_cast<i64>(n)) * lg2(static_cast<i64>(n));
      break;
  }
  return c;
}

namespace {

struct LeafContext {
  const LogicalQuery* q;
  const PlannerInputs* inputs;
};

Predicate fused_filter(const LogicalQuery& q, const std::string& alias) {
  auto it = q.filters.find(alias);
  if (it == q.filters.end()) return {};
  return it->second.fused();
}

bool predicate_covers_domain(const Predicate& p, const TableSchema& schema) {
  for (const AttrCondition& c : p.conjuncts) {
    const AttrDomain& d = schema.domain(c.attr);
    if (!c.vals.covers(d.lo, d.hi)) return false;
  }
  return true;
}

}  // namespace

std::vector<AccessPath> enumerate_access_paths(const LogicalQuery& q,
                                               const std::string& alias,
                                               const PlannerInputs& inputs) {
  const TableRef* ref = q.find_alias(alias);
  if (!ref) throw InvalidParameter("unknown alias '" + alias + "'");
  const Relation& rel = inputs.db->table(ref->table);
  const i64 n = static_cast<i64>(rel.row_count());
  const Synopsis* syn = inputs.synopsis_for(ref->table);
  const IndexedStore* store = inputs.store_for(ref->table);
  const CostWeights w{inputs.config.w_io, inputs.config.w_ev};
  const Predicate fused = fused_filter(q, alias);

  std::vector<AccessPath> out;

  auto scan_node = [&]() {
    auto node = std::make_shared<PlanNode>();
    node->op = PlanOp::SeqScan;
    node->alias = alias;
    node->table = ref->table;
    node->est_out = n;
    node->cost = op_cost(PlanOp::SeqScan, {n}, n, w);
    return node;
  };

  if (fused.empty()) {
    AccessPath p;
    p.node = scan_node();
    p.out = n;
    p.cost = p.node->cost.total();
    p.sig = alias + ":scan";
    if (store) p.store_sorted_attr = store->attr;
    out.push_back(std::move(p));
    return out;
  }

  const i64 cs = card_est(n, fused.conjuncts, syn);

  {  // plain oblivious filter, no compaction
    AccessPath p;
    auto node = std::make_shared<PlanNode>();
    node->op = PlanOp::Select;
    node->children.push_back(scan_node());
    node->alias = alias;
    node->table = ref->table;
    node->predicate = fused;
    node->est_in = {n};
    node->est_out = n;
    node->cost = op_cost(PlanOp::Select, {n}, n, w);
    p.node = node;
    p.out = n;
    p.cost = node->children[0]->cost.total() + node->cost.total();
    p.sig = alias + ":select";
    out.push_back(std::move(p));
  }

  {  // filter + oblivious compaction to the pessimistic cardinality
    AccessPath p;
    auto node = std::make_shared<PlanNode>();
    node->op = PlanOp::OpSelect;
    node->children.push_back(scan_node());
    node->alias = alias;
    node->table = ref->table;
    node->predicate = fused;
    node->cs = cs;
    node->est_in = {n};
    node->est_out = cs;
    node->cost = op_cost(PlanOp::OpSelect, {n}, cs, w);
    p.node = node;
    p.out = cs;
    p.cost = node->children[0]->cost.total() + node->cost.total();
    p.sig = alias + ":op_select";
    out.push_back(std::move(p));
  }

  if (static_cast<double>(cs) <= static_cast<double>(n) / lg2(n)) {
    // near-constant output: the two-scan private write wins over sorting
    AccessPath p;
    auto node = std::make_shared<PlanNode>();
    node->op = PlanOp::SpSelect;
    node->children.push_back(scan_node());
    node->alias = alias;
    node->table = ref->table;
    node->predicate = fused;
    node->cs = cs;
    node->est_in = {n};
    node->est_out = cs;
    node->cost = op_cost(PlanOp::SpSelect, {n}, cs, w);
    p.node = node;
    p.out = cs;
    p.cost = node->children[0]->cost.total() + node->cost.total();
    p.sig = alias + ":sp_select";
    out.push_back(std::move(p));
  }

  if (store && fused.on(store->attr)) {
    AccessPath p;
    auto node = std::make_shared<PlanNode>();
    node->op = PlanOp::DcSelect;
    node->alias = alias;
    node->table = ref->table;
    node->predicate = fused;
    const auto interval = lookup(store->index, fused.on(store->attr)->vals);
    node->dc_lo = interval ? interval->first : 0;
    node->dc_hi = interval ? interval->second : 0;
    // Bin granularity and noise margins admit false positives; refinement is
    // skippable only when every conjunct covers its whole domain.
    node->dc_refine = !predicate_covers_domain(fused, rel.schema);
    const i64 width = node->dc_hi - node->dc_lo;
    node->est_in = {width};
    node->est_out = width;
    node->cost = op_cost(PlanOp::DcSelect, {width}, width, w);
    p.node = node;
    p.out = width;
    p.cost = node->cost.total();
    p.sig = alias + ":dc_select";
    out.push_back(std::move(p));
  }

  return out;
}

namespace {

// Join-side statistics derivable from the synopsis for a leaf relation:
// the MF estimate and the per-bucket slice intervals on the join attribute.
std::optional<std::pair<SpecialIndex, i64>> side_index_and_mf(
    const LogicalQuery& q, const PlannerInputs& inputs,
    const std::string& alias, const std::string& join_attr, i64 physical_len) {
  const TableRef* ref = q.find_alias(alias);
  const Relation& rel = inputs.db->table(ref->table);
  const Synopsis* syn = inputs.synopsis_for(ref->table);
  if (!syn) return std::nullopt;
  if (!rel.schema.has_column(join_attr)) return std::nullopt;
  const bool unique = rel.schema.domain(join_attr).unique_valued;
  const Predicate fused = fused_filter(q, alias);

  std::optional<i64> standalone;
  if (const SynopsisEntry* g = syn->find_pair(std::nullopt, join_attr)) {
    standalone = g->mf.global;
  }

  if (fused.empty()) {
    const auto hist = bounding_1d(*syn, join_attr);
    if (!hist) return std::nullopt;
    i64 mf = 0;
    if (unique) {
      mf = 1;
    } else if (standalone) {
      mf = *standalone;
    } else {
      // sum of per-bin MFs of a covering pair bounds the global MF
      const SynopsisEntry* pair = nullptr;
      for (const SynopsisEntry& e : syn->entries) {
        if (e.pair.join_attr == join_attr && e.pair.filter_attr) {
          pair = &e;
          break;
        }
      }
      if (!pair || pair->mf.per_bin.empty()) return std::nullopt;
      for (i64 v : pair->mf.per_bin) mf += v;
    }
    return std::make_pair(build_index(*hist, physical_len), mf);
  }

  // Pre-filtered relation: need a pair (filter attr, join attr) covering one
  // of the fused conjuncts.
  const SynopsisEntry* pair = nullptr;
  const AttrCondition* cond = nullptr;
  for (const SynopsisEntry& e : syn->entries) {
    if (e.pair.join_attr != join_attr || !e.pair.filter_attr) continue;
    if (const AttrCondition* c = fused.on(*e.pair.filter_attr)) {
      pair = &e;
      cond = c;
      break;
    }
  }
  if (!pair) return std::nullopt;

  BoundingHistogram fh = filtered_histogram(pair->hist, cond->vals);
  if (fused.conjuncts.size() > 1) {
    // Conjuncts beyond the covered one shrink the true histogram further;
    // only the all-zero lower bound stays sound.
    std::fill(fh.lower.counts.begin(), fh.lower.counts.end(), 0);
  }
  const i64 n = static_cast<i64>(rel.row_count());
  const i64 total = std::min(card_est(n, fused.conjuncts, syn), physical_len);
  i64 mf = unique ? 1 : filtered_mf(*pair, cond->vals, standalone);
  return std::make_pair(build_index(fh, total), mf);
}

struct JoinEdgeSet {
  std::vector<JoinEdge> edges;
  std::optional<std::string> common_attr;  // set when all edges share an attr
};

JoinEdgeSet cross_edges(const LogicalQuery& q, const std::string& alias,
                        const std::vector<std::string>& placed) {
  JoinEdgeSet s;
  s.edges = q.edges_between(alias, placed);
  if (!s.edges.empty()) {
    const std::string& a = s.edges[0].left_attr;
    bool same = true;
    for (const JoinEdge& e : s.edges) {
      if (e.left_attr != a || e.right_attr != a) same = false;
    }
    if (same) s.common_attr = a;
  }
  return s;
}

std::vector<std::pair<std::string, std::string>> qualified_eqs(
    const std::vector<JoinEdge>& edges) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const JoinEdge& e : edges) {
    out.emplace_back(e.left_alias + "." + e.left_attr,
                     e.right_alias + "." + e.right_attr);
  }
  return out;
}

}  // namespace

LeftState initial_state(const AccessPath& path, const std::string& alias) {
  LeftState s;
  s.plan = path.node;
  s.out = path.out;
  s.cost = path.cost;
  s.placed = {alias};
  s.single_store_sorted_attr = path.store_sorted_attr;
  s.sig = path.sig;
  return s;
}

std::vector<LeftState> extend_state(const LogicalQuery& q,
                                    const PlannerInputs& inputs,
                                    const LeftState& left,
                                    const AccessPath& leaf,
                                    const std::string& alias) {
  const CostWeights w{inputs.config.w_io, inputs.config.w_ev};
  std::vector<LeftState> out;
  const JoinEdgeSet es = cross_edges(q, alias, left.placed);
  const auto eqs = qualified_eqs(es.edges);

  {  // cartesian join (always available; pure cross when no edge exists)
    LeftState s;
    auto node = std::make_shared<PlanNode>();
    node->op = PlanOp::CartesianJoin;
    node->children = {left.plan, leaf.node};
    node->eq_cols = eqs;
    node->est_in = {left.out, leaf.out};
    node->est_out = sat_mul(left.out, leaf.out);
    node->cost = op_cost(PlanOp::CartesianJoin, {left.out, leaf.out},
                         node->est_out, w);
    s.plan = node;
    s.out = node->est_out;
    s.cost = left.cost + leaf.cost + node->cost.total();
    s.placed = left.placed;
    s.placed.push_back(alias);
    s.sig = left.sig + "|x|" + leaf.sig;
    out.push_back(std::move(s));
  }

  // Bucketized MF join needs every cross edge on one attribute with
  // derivable statistics (or readiness) on both sides.
  if (!es.common_attr) return out;
  const std::string& attr = *es.common_attr;

  MxSideParams lhs;
  std::optional<ReadyInfo> lready = left.ready;
  std::vector<std::string> key_cols;
  if (left.placed.size() == 1) {
    const auto stats =
        side_index_and_mf(q, inputs, left.placed[0], attr, left.out);
    if (!stats) return out;
    lhs.key_col = left.placed[0] + "." + attr;
    lhs.mf_hat = stats->second;
    lhs.intervals = stats->first.intervals;
    lhs.presorted = left.single_store_sorted_attr == attr;
    key_cols = {lhs.key_col};
    lready = ReadyInfo{attr, key_cols, lhs.mf_hat, stats->first.edges,
                       lhs.intervals};
  } else {
    if (!left.ready || left.ready->attr != attr) return out;
    lhs.key_col = left.ready->key_cols.front();
    lhs.mf_hat = left.ready->mf_hat;
    lhs.intervals = left.ready->intervals;
    lhs.presorted = true;  // bucket layout of the previous mx_join
    key_cols = left.ready->key_cols;
  }
  // Every edge's placed-side column must be key-equivalent to the bucket key.
  for (const JoinEdge& e : es.edges) {
    const std::string col = e.left_alias + "." + e.left_attr;
    if (std::find(key_cols.begin(), key_cols.end(), col) == key_cols.end()) {
      return out;
    }
  }

  const auto rstats = side_index_and_mf(q, inputs, alias, attr, leaf.out);
  if (!rstats) return out;
  if (rstats->first.edges != lready->bin_edges) return out;  // bins must align

  MxSideParams rhs;
  rhs.key_col = alias + "." + attr;
  rhs.mf_hat = rstats->second;
  rhs.intervals = rstats->first.intervals;
  rhs.presorted = leaf.store_sorted_attr == attr;

  MxJoinParams params;
  params.join_attr = attr;
  params.bin_edges = lready->bin_edges;
  params.left = lhs;
  params.right = rhs;
  params.eq_cols = eqs;
  params.cs = mx_bucket_bounds(params);

  i64 est = 0;
  OpCostDetail detail;
  for (size_t i = 0; i < params.cs.size(); ++i) {
    est += params.cs[i];
    const i64 wl = lhs.intervals[i].second - lhs.intervals[i].first;
    const i64 wr = rhs.intervals[i].second - rhs.intervals[i].first;
    detail.bucket_products.push_back(sat_mul(wl, wr));
  }
  if (!lhs.presorted) detail.sort_sizes.push_back(left.out);
  if (!rhs.presorted) detail.sort_sizes.push_back(leaf.out);

  LeftState s;
  auto node = std::make_shared<PlanNode>();
  node->op = PlanOp::MxJoin;
  node->children = {left.plan, leaf.node};
  node->eq_cols = eqs;
  node->mx = params;
  node->est_in = {left.out, leaf.out};
  node->est_out = est;
  node->cost = op_cost(PlanOp::MxJoin, {left.out, leaf.out}, est, w, detail);

  ReadyInfo ready;
  ready.attr = attr;
  ready.key_cols = key_cols;
  ready.key_cols.push_back(rhs.key_col);
  ready.mf_hat = lhs.mf_hat * rhs.mf_hat;
  ready.bin_edges = params.bin_edges;
  i64 offset = 0;
  for (i64 c : params.cs) {
    ready.intervals.emplace_back(offset, offset + c);
    offset += c;
  }
  node->annotation = {attr, ready.key_cols, true, ready.mf_hat,
                      ready.bin_edges, ready.intervals};

  s.plan = node;
  s.out = est;
  s.cost = left.cost + leaf.cost + node->cost.total();
  s.placed = left.placed;
  s.placed.push_back(alias);
  s.ready = ready;
  s.sig = left.sig + "|mx|" + leaf.sig;
  out.push_back(std::move(s));
  return out;
}

LeftState finish_with_aggregation(const LogicalQuery& q,
                                  const PlannerInputs& inputs,
                                  LeftState state) {
  const CostWeights w{inputs.config.w_io, inputs.config.w_ev};
  const Aggregation& agg = q.agg;
  auto add = [&](PlanOp op, AggKind kind, const std::string& attr,
                 std::vector<std::string> attrs, i64 est_out) {
    auto node = std::make_shared<PlanNode>();
    node->op = op;
    node->children = {state.plan};
    node->agg_kind = kind;
    node->agg_attr = attr;
    node->attrs = std::move(attrs);
    node->est_in = {state.out};
    node->est_out = est_out;
    node->cost = op_cost(op, {state.out}, est_out, w);
    state.plan = node;
    state.cost += node->cost.total();
    state.out = est_out;
  };

  switch (agg.kind) {
    case AggKind::None:
      break;
    case AggKind::Count:
      if (agg.group_by) {
        add(PlanOp::GroupBy, AggKind::Count, agg.attr, {*agg.group_by},
            state.out);
        if (agg.order_by_agg) {
          add(PlanOp::OrderBy, AggKind::None, "", {agg_column_name()},
              state.out);
        }
      } else {
        add(PlanOp::Aggregate, AggKind::Count, agg.attr, {}, 1);
      }
      break;
    case AggKind::CountDistinct:
      add(PlanOp::Distinct, AggKind::None, "", {agg.attr}, state.out);
      add(PlanOp::Aggregate, AggKind::CountDistinct, agg.attr, {}, 1);
      break;
    case AggKind::Sum:
    case AggKind::Min:
    case AggKind::Max:
      add(PlanOp::Aggregate, agg.kind, agg.attr, {}, 1);
      break;
  }
  state.ready.reset();
  return state;
}

namespace {

// Pareto frontier entry comparison for the DP memo. Returns true when `a`
// renders `b` redundant: no completion of the prefix can make `b` cheaper.
bool dominates(const LeftState& a, const LeftState& b) {
  if (a.cost > b.cost || a.out > b.out) return false;
  if (a.ready.has_value() != b.ready.has_value()) return false;
  if (a.ready) {
    if (a.ready->attr != b.ready->attr) return false;
    if (a.ready->mf_hat > b.ready->mf_hat) return false;
    if (a.ready->intervals.size() != b.ready->intervals.size()) return false;
    for (size_t i = 0; i < a.ready->intervals.size(); ++i) {
      const i64 wa =
          a.ready->intervals[i].second - a.ready->intervals[i].first;
      const i64 wb =
          b.ready->intervals[i].second - b.ready->intervals[i].first;
      if (wa > wb) return false;
    }
    for (const std::string& col : b.ready->key_cols) {
      if (std::find(a.ready->key_cols.begin(), a.ready->key_cols.end(), col) ==
          a.ready->key_cols.end()) {
        return false;
      }
    }
  }
  if (a.single_store_sorted_attr != b.single_store_sorted_attr &&
      b.single_store_sorted_attr.has_value()) {
    return false;
  }
  if (a.cost == b.cost && a.out == b.out) return a.sig <= b.sig;
  return true;
}

void frontier_insert(std::vector<LeftState>& frontier, LeftState entry) {
  for (const LeftState& e : frontier) {
    if (dominates(e, entry)) return;
  }
  frontier.erase(std::remove_if(frontier.begin(), frontier.end(),
                                [&](const LeftState& e) {
                                  return dominates(entry, e);
                                }),
                 frontier.end());
  frontier.push_back(std::move(entry));
}

PlanPtr plan_special(const LogicalQuery& q, const PlannerInputs& inputs) {
  const size_t r = q.relations.size();
  if (r == 0) throw InvalidParameter("query references no relations");
  if (r > 20) throw InvalidParameter("too many relations for plan search");

  std::vector<std::vector<AccessPath>> paths(r);
  for (size_t i = 0; i < r; ++i) {
    paths[i] = enumerate_access_paths(q, q.relations[i].alias, inputs);
  }

  // memo key: (subset mask, ready attribute or "")
  std::map<std::pair<u32, std::string>, std::vector<LeftState>> memo;
  for (size_t i = 0; i < r; ++i) {
    for (const AccessPath& p : paths[i]) {
      LeftState s = initial_state(p, q.relations[i].alias);
      frontier_insert(memo[{u32{1} << i, ""}], std::move(s));
    }
  }

  for (u32 mask = 1; mask < (u32{1} << r); ++mask) {
    // collect existing frontiers for this mask (all ready keys)
    std::vector<LeftState> states;
    for (const auto& [key, frontier] : memo) {
      if (key.first != mask) continue;
      states.insert(states.end(), frontier.begin(), frontier.end());
    }
    if (states.empty()) continue;
    for (size_t i = 0; i < r; ++i) {
      if (mask & (u32{1} << i)) continue;
      const u32 next = mask | (u32{1} << i);
      for (const LeftState& st : states) {
        for (const AccessPath& p : paths[i]) {
          for (LeftState& cand :
               extend_state(q, inputs, st, p, q.relations[i].alias)) {
            const std::string key = cand.ready ? cand.ready->attr : "";
            frontier_insert(memo[{next, key}], std::move(cand));
          }
        }
      }
    }
  }

  const u32 full = (u32{1} << r) - 1;
  std::optional<LeftState> best;
  for (const auto& [key, frontier] : memo) {
    if (key.first != full) continue;
    for (const LeftState& st : frontier) {
      LeftState done = finish_with_aggregation(q, inputs, st);
      if (!best || done.cost < best->cost ||
          (done.cost == best->cost && done.sig < best->sig)) {
        best = std::move(done);
      }
    }
  }
  if (!best) throw InvalidParameter("unsatisfiable query shape");
  return best->plan;
}

PlanPtr plan_random_order(const LogicalQuery& q, const PlannerInputs& inputs,
                          PlanMode mode, u64 order_seed) {
  const CostWeights w{inputs.config.w_io, inputs.config.w_ev};
  std::vector<size_t> order(q.relations.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng = seeded_rng(order_seed);
  std::shuffle(order.begin(), order.end(), rng);

  auto leaf_for = [&](const std::string& alias) {
    const TableRef* ref = q.find_alias(alias);
    const Relation& rel = inputs.db->table(ref->table);
    const i64 n = static_cast<i64>(rel.row_count());
    auto scan = std::make_shared<PlanNode>();
    scan->op = PlanOp::SeqScan;
    scan->alias = alias;
    scan->table = ref->table;
    scan->est_out = n;
    PlanPtr head = scan;
    const Predicate fused = fused_filter(q, alias);
    if (!fused.empty()) {
      auto sel = std::make_shared<PlanNode>();
      sel->op = PlanOp::Select;
      sel->children = {head};
      sel->alias = alias;
      sel->table = ref->table;
      sel->predicate = fused;
      sel->est_in = {n};
      sel->est_out = n;
      sel->cost = op_cost(PlanOp::Select, {n}, n, w);
      head = sel;
    }
    if (mode == PlanMode::Reactive) {
      auto rc = std::make_shared<PlanNode>();
      rc->op = PlanOp::RevealCompact;
      rc->children = {head};
      rc->est_in = {head->est_out};
      rc->est_out = head->est_out;  // true size revealed only at runtime
      rc->cost = op_cost(PlanOp::RevealCompact, {head->est_out},
                         head->est_out, w);
      head = rc;
    }
    return head;
  };

  std::vector<std::string> placed;
  PlanPtr head = leaf_for(q.relations[order[0]].alias);
  placed.push_back(q.relations[order[0]].alias);
  for (size_t k = 1; k < order.size(); ++k) {
    const std::string& alias = q.relations[order[k]].alias;
    PlanPtr leaf = leaf_for(alias);
    const auto eqs = qualified_eqs(q.edges_between(alias, placed));
    auto node = std::make_shared<PlanNode>();
    node->op = PlanOp::CartesianJoin;
    node->children = {head, leaf};
    node->eq_cols = eqs;
    node->est_in = {head->est_out, leaf->est_out};
    node->est_out = sat_mul(head->est_out, leaf->est_out);
    node->cost = op_cost(PlanOp::CartesianJoin,
                         {head->est_out, leaf->est_out}, node->est_out, w);
    head = node;
    if (mode == PlanMode::Reactive) {
      auto rc = std::make_shared<PlanNode>();
      rc->op = PlanOp::RevealCompact;
      rc->children = {head};
      rc->est_in = {head->est_out};
      rc->est_out = head->est_out;
      rc->cost = op_cost(PlanOp::RevealCompact, {head->est_out},
                         head->est_out, w);
      head = rc;
    }
    placed.push_back(alias);
  }

  LeftState st;
  st.plan = head;
  st.out = head->est_out;
  st.placed = placed;
  return finish_with_aggregation(q, inputs, st).plan;
}

void number_nodes(PlanNode& node, int& next) {
  node.node_id = next++;
  for (const PlanPtr& c : node.children) number_nodes(*c, next);
}

}  // namespace

PlanPtr plan_query(const LogicalQuery& q, const PlannerInputs& inputs,
                   PlanMode mode, u64 order_seed) {
  PlanPtr plan = mode == PlanMode::Special
                     ? plan_special(q, inputs)
                     : plan_random_order(q, inputs, mode, order_seed);
  int next = 0;
  number_nodes(*plan, next);
  return plan;
}

double plan_total_cost(const PlanNode& root) {
  double total = root.cost.total();
  for (const PlanPtr& c : root.children) total += plan_total_cost(*c);
  return total;
}

i64 plan_estimated_intermediate(const PlanNode& root) {
  i64 total = root.est_out;
  for (const PlanPtr& c : root.children) {
    total += plan_estimated_intermediate(*c);
  }
  return total;
}

namespace {

void explain_node(const PlanNode& node, int depth, std::ostringstream& out) {
  out << std::string(static_cast<size_t>(depth) * 2, ' ') << "#"
      << node.node_id << " " << plan_op_name(node.op);
  if (!node.alias.empty()) out << " " << node.alias;
  if (node.op == PlanOp::MxJoin) out << " on " << node.mx.join_attr;
  out << " est_out=" << node.est_out << " cost=" << node.cost.total() << "\n";
  for (const PlanPtr& c : node.children) explain_node(*c, depth + 1, out);
}

void explain_nodes_json(const PlanNode& node, nlohmann::json& nodes) {
  nlohmann::json j;
  j["node_id"] = node.node_id;
  j["op"] = plan_op_name(node.op);
  std::vector<int> kids;
  for (const PlanPtr& c : node.children) kids.push_back(c->node_id);
  j["children"] = kids;
  j["est_in"] = node.est_in;
  j["est_out"] = node.est_out;
  j["cost"] = {{"in", node.cost.c_in},
               {"eval", node.cost.c_eval},
               {"out", node.cost.c_out},
               {"total", node.cost.total()}};
  if (!node.alias.empty()) j["alias"] = node.alias;
  if (!node.table.empty()) j["table"] = node.table;
  if (node.op == PlanOp::DcSelect) {
    j["interval"] = {node.dc_lo, node.dc_hi};
    j["refine"] = node.dc_refine;
  }
  if (node.op == PlanOp::OpSelect || node.op == PlanOp::SpSelect) {
    j["cs"] = node.cs;
  }
  if (node.op == PlanOp::MxJoin) {
    j["annotation"] = {{"join_attr", node.annotation.join_attr},
                       {"mf_ready", node.annotation.mf_ready},
                       {"mf_hat", node.annotation.mf_hat},
                       {"cs", node.mx.cs}};
  }
  nodes.push_back(j);
  for (const PlanPtr& c : node.children) explain_nodes_json(*c, nodes);
}

}  // namespace

std::string explain_text(const PlanNode& root) {
  std::ostringstream out;
  explain_node(root, 0, out);
  out << "total_cost=" << plan_total_cost(root)
      << " total_est_intermediate=" << plan_estimated_intermediate(root)
      << "\n";
  return out.str();
}

nlohmann::json explain_json(const PlanNode& root) {
  nlohmann::json doc;
  nlohmann::json nodes = nlohmann::json::array();
  explain_nodes_json(root, nodes);
  doc["nodes"] = nodes;
  doc["total_cost"] = plan_total_cost(root);
  doc["total_est_intermediate"] = plan_estimated_intermediate(root);
  return doc;
}

}  // namespace synoq
