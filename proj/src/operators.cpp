#include "synoq/operators.hpp"

#include <algorithm>

namespace synoq {

namespace {

constexpr u32 kDummy = 0xFFFFFFFFu;  // encoded -1

// Predicate match bit for one row, built from eq / range gates per condition.
SecureValue match_row(ExecutionContext& ctx, const SecureArray& a, size_t row,
                      const Predicate& p, const std::vector<int>& cols) {
  SecureValue all = ctx.share(1);
  for (size_t k = 0; k < p.conjuncts.size(); ++k) {
    const SecureValue v = a.cell(row, static_cast<size_t>(cols[k]));
    SecureValue any = ctx.share(0);
    for (const auto& [lo, hi] : p.conjuncts[k].vals.ranges) {
      SecureValue hit;
      if (lo == hi) {
        hit = g_eq(ctx, v, ctx.share(static_cast<u32>(lo)));
      } else {
        const SecureValue ge =
            g_not(ctx, g_lt(ctx, v, ctx.share(static_cast<u32>(lo))));
        const SecureValue le =
            g_not(ctx, g_lt(ctx, ctx.share(static_cast<u32>(hi)), v));
        hit = g_and(ctx, ge, le);
      }
      any = g_or(ctx, any, hit);
    }
    all = g_and(ctx, all, any);
  }
  return all;
}

std::vector<int> predicate_columns(const SecureArray& a, const Predicate& p) {
  std::vector<int> cols;
  cols.reserve(p.conjuncts.size());
  for (const AttrCondition& c : p.conjuncts) cols.push_back(a.col(c.attr));
  return cols;
}

}  // namespace

Predicate qualify(const Predicate& predicate, const std::string& alias) {
  Predicate out = predicate;
  for (AttrCondition& c : out.conjuncts) c.attr = alias + "." + c.attr;
  return out;
}

SecureArray select(ExecutionContext& ctx, const SecureArray& input,
                   const Predicate& predicate) {
  const std::vector<int> cols = predicate_columns(input, predicate);
  SecureArray out = input;
  out.id = ctx.new_array_id();
  for (size_t r = 0; r < input.rows(); ++r) {
    ctx.trace.record(OpTag::Select, input.id, TraceKind::Read,
                     static_cast<u32>(r));
    SecureValue m = match_row(ctx, input, r, predicate, cols);
    out.ret[r] = g_and(ctx, m, effective_ret(ctx, input, r));
    ctx.trace.record(OpTag::Select, out.id, TraceKind::Write,
                     static_cast<u32>(r));
  }
  out.validated = true;
  ctx.stats.alloc_cells(out.cells.size() + out.ret.size());
  return out;
}

SecureArray project(ExecutionContext& ctx, const SecureArray& input,
                    const std::vector<std::string>& attrs) {
  std::vector<int> cols;
  cols.reserve(attrs.size());
  for (const std::string& a : attrs) cols.push_back(input.col(a));
  SecureArray out;
  out.id = ctx.new_array_id();
  out.schema = attrs;
  out.validated = input.validated;
  out.cells.reserve(input.rows() * attrs.size());
  for (size_t r = 0; r < input.rows(); ++r) {
    ctx.trace.record(OpTag::Project, input.id, TraceKind::Read,
                     static_cast<u32>(r));
    for (int c : cols) out.cells.push_back(input.cell(r, static_cast<size_t>(c)));
    out.ret.push_back(input.ret[r]);
    ctx.trace.record(OpTag::Project, out.id, TraceKind::Write,
                     static_cast<u32>(r));
  }
  ctx.stats.alloc_cells(out.cells.size() + out.ret.size());
  return out;
}

SecureArray join_cartesian(
    ExecutionContext& ctx, const SecureArray& a, const SecureArray& b,
    const std::vector<std::pair<std::string, std::string>>& eqs) {
  const u64 out_rows = static_cast<u64>(a.rows()) * b.rows();
  if (out_rows > ctx.join_cap()) {
    throw JoinCapExceeded("cartesian product of " + std::to_string(a.rows()) +
                          " x " + std::to_string(b.rows()) +
                          " tuples exceeds the materialization cap");
  }
  std::vector<std::pair<int, int>> eq_cols;
  for (const auto& [ca, cb] : eqs) eq_cols.emplace_back(a.col(ca), b.col(cb));

  SecureArray out;
  out.id = ctx.new_array_id();
  out.schema = a.schema;
  out.schema.insert(out.schema.end(), b.schema.begin(), b.schema.end());
  out.validated = true;
  out.cells.reserve(out_rows * out.schema.size());
  out.ret.reserve(out_rows);
  for (size_t i = 0; i < a.rows(); ++i) {
    ctx.trace.record(OpTag::Join, a.id, TraceKind::Read, static_cast<u32>(i));
  }
  for (size_t j = 0; j < b.rows(); ++j) {
    ctx.trace.record(OpTag::Join, b.id, TraceKind::Read, static_cast<u32>(j));
  }
  u32 k = 0;
  for (size_t i = 0; i < a.rows(); ++i) {
    for (size_t j = 0; j < b.rows(); ++j, ++k) {
      for (size_t c = 0; c < a.width(); ++c) out.cells.push_back(a.cell(i, c));
      for (size_t c = 0; c < b.width(); ++c) out.cells.push_back(b.cell(j, c));
      SecureValue r = g_and(ctx, effective_ret(ctx, a, i),
                            effective_ret(ctx, b, j));
      for (const auto& [ca, cb] : eq_cols) {
        r = g_and(ctx, r,
                  g_eq(ctx, a.cell(i, static_cast<size_t>(ca)),
                       b.cell(j, static_cast<size_t>(cb))));
      }
      out.ret.push_back(r);
      ctx.trace.record(OpTag::Join, out.id, TraceKind::Write, k);
    }
  }
  ctx.stats.alloc_cells(out.cells.size() + out.ret.size());
  return out;
}

AggregateResult aggregate(ExecutionContext& ctx, const SecureArray& input,
                          AggKind kind, const std::string& attr) {
  if (kind == AggKind::None) {
    throw InvalidParameter("aggregate requires an aggregation kind");
  }
  int col = -1;
  if (kind != AggKind::Count) col = input.col(attr);

  SecureValue acc;
  switch (kind) {
    case AggKind::Min: acc = ctx.share(kDummy); break;
    default: acc = ctx.share(0); break;
  }
  SecureValue count = ctx.share(0);
  const SecureValue one = ctx.share(1);
  for (size_t r = 0; r < input.rows(); ++r) {
    ctx.trace.record(OpTag::Aggregate, input.id, TraceKind::Read,
                     static_cast<u32>(r));
    const SecureValue e = effective_ret(ctx, input, r);
    count = g_add(ctx, count, g_mux(ctx, e, one, ctx.share(0)));
    switch (kind) {
      case AggKind::Count:
      case AggKind::CountDistinct:
        break;  // count is the accumulator
      case AggKind::Sum: {
        const SecureValue v = input.cell(r, static_cast<size_t>(col));
        acc = g_add(ctx, acc, g_mux(ctx, e, v, ctx.share(0)));
        break;
      }
      case AggKind::Min: {
        const SecureValue v = input.cell(r, static_cast<size_t>(col));
        const SecureValue take = g_and(ctx, e, g_lt(ctx, v, acc));
        acc = g_mux(ctx, take, v, acc);
        break;
      }
      case AggKind::Max: {
        const SecureValue v = input.cell(r, static_cast<size_t>(col));
        const SecureValue take = g_and(ctx, e, g_lt(ctx, acc, v));
        acc = g_mux(ctx, take, v, acc);
        break;
      }
      case AggKind::None:
        break;
    }
  }
  AggregateResult res;
  res.valid_count = count;
  res.value = (kind == AggKind::Count || kind == AggKind::CountDistinct)
                  ? count
                  : acc;
  return res;
}

namespace {

SecureValue rows_equal(ExecutionContext& ctx, const SecureArray& a, size_t i,
                       size_t j, const std::vector<int>& cols) {
  SecureValue eq = ctx.share(1);
  for (int c : cols) {
    eq = g_and(ctx, eq,
               g_eq(ctx, a.cell(i, static_cast<size_t>(c)),
                    a.cell(j, static_cast<size_t>(c))));
  }
  return eq;
}

}  // namespace

SecureArray distinct(ExecutionContext& ctx, const SecureArray& input,
                     const std::vector<std::string>& attrs) {
  SortSpec spec;
  spec.valid_first = true;
  for (const std::string& a : attrs) spec.keys.push_back({input.col(a), true});
  SecureArray sorted = oblivious_sort(ctx, input, spec, OpTag::Distinct);

  const size_t n = sorted.rows();
  std::vector<int> cols;
  for (const std::string& a : attrs) cols.push_back(sorted.col(a));
  SecureArray out = sorted;
  out.id = ctx.new_array_id();
  for (size_t r = 0; r < n; ++r) {
    ctx.trace.record(OpTag::Distinct, sorted.id, TraceKind::Read,
                     static_cast<u32>(r));
    const SecureValue e = effective_ret(ctx, sorted, r);
    SecureValue last;
    if (r + 1 == n) {
      last = e;
    } else {
      const SecureValue follow =
          g_and(ctx, effective_ret(ctx, sorted, r + 1),
                rows_equal(ctx, sorted, r, r + 1, cols));
      last = g_and(ctx, e, g_not(ctx, follow));
    }
    out.ret[r] = last;
    ctx.trace.record(OpTag::Distinct, out.id, TraceKind::Write,
                     static_cast<u32>(r));
  }
  out.validated = true;
  return out;
}

const std::string& agg_column_name() {
  static const std::string name = "__agg";
  return name;
}

SecureArray group_by_agg(ExecutionContext& ctx, const SecureArray& input,
                         const std::vector<std::string>& keys, AggKind agg,
                         const std::string& agg_attr) {
  if (agg != AggKind::Count && agg != AggKind::Sum) {
    throw InvalidParameter("group_by_agg supports count and sum");
  }
  SortSpec spec;
  spec.valid_first = true;
  for (const std::string& a : keys) spec.keys.push_back({input.col(a), true});
  SecureArray sorted = oblivious_sort(ctx, input, spec, OpTag::GroupBy);

  const size_t n = sorted.rows();
  std::vector<int> cols;
  for (const std::string& a : keys) cols.push_back(sorted.col(a));
  const int vcol = agg == AggKind::Sum ? sorted.col(agg_attr) : -1;

  // Forward pass accumulates the running aggregate of each run; the run
  // total lands on its last row.
  std::vector<SecureValue> run(n);
  SecureValue prev = ctx.share(0);
  for (size_t r = 0; r < n; ++r) {
    ctx.trace.record(OpTag::GroupBy, sorted.id, TraceKind::Read,
                     static_cast<u32>(r));
    const SecureValue e = effective_ret(ctx, sorted, r);
    SecureValue same = ctx.share(0);
    if (r > 0) {
      same = g_and(ctx, e,
                   g_and(ctx, effective_ret(ctx, sorted, r - 1),
                         rows_equal(ctx, sorted, r - 1, r, cols)));
    }
    SecureValue acc = g_mux(ctx, same, prev, ctx.share(0));
    const SecureValue step =
        agg == AggKind::Count
            ? g_mux(ctx, e, ctx.share(1), ctx.share(0))
            : g_mux(ctx, e, sorted.cell(r, static_cast<size_t>(vcol)),
                    ctx.share(0));
    acc = g_add(ctx, acc, step);
    run[r] = acc;
    prev = acc;
  }

  SecureArray out;
  out.id = ctx.new_array_id();
  out.schema = sorted.schema;
  out.schema.push_back(agg_column_name());
  out.validated = true;
  for (size_t r = 0; r < n; ++r) {
    const SecureValue e = effective_ret(ctx, sorted, r);
    SecureValue last;
    if (r + 1 == n) {
      last = e;
    } else {
      const SecureValue follow =
          g_and(ctx, effective_ret(ctx, sorted, r + 1),
                rows_equal(ctx, sorted, r, r + 1, cols));
      last = g_and(ctx, e, g_not(ctx, follow));
    }
    for (size_t c = 0; c < sorted.width(); ++c) {
      out.cells.push_back(sorted.cell(r, c));
    }
    out.cells.push_back(g_mux(ctx, last, run[r], ctx.share(kDummy)));
    out.ret.push_back(last);
    ctx.trace.record(OpTag::GroupBy, out.id, TraceKind::Write,
                     static_cast<u32>(r));
  }
  ctx.stats.alloc_cells(out.cells.size() + out.ret.size());
  return out;
}

SecureArray op_select(ExecutionContext& ctx, const SecureArray& input,
                      const Predicate& predicate, i64 cs) {
  SecureArray marked = select(ctx, input, predicate);
  return opac(ctx, marked, std::min<i64>(cs, static_cast<i64>(marked.rows())));
}

SecureArray sp_select(ExecutionContext& ctx, const SecureArray& input,
                      const Predicate& predicate, i64 cs) {
  // Scan 1: mark.
  SecureArray marked = select(ctx, input, predicate);
  return sp_write_phase(ctx, marked, cs);
}

SecureArray sp_write_phase(ExecutionContext& ctx, const SecureArray& marked,
                           i64 cs) {
  if (cs < 0 || cs > static_cast<i64>(marked.rows())) {
    throw InvalidParameter("sp_select bound outside [0, n]");
  }
  // Scan 2: private writes into a cs-sized output. `cursor` is the next
  // write slot; every input row issues a write event on every output slot,
  // actual or dummy (a dummy write re-shares the slot unchanged).
  SecureArray out = ctx.make_array(marked.schema, static_cast<size_t>(cs));
  out.validated = true;
  SecureValue cursor = ctx.share(0);
  for (size_t r = 0; r < marked.rows(); ++r) {
    ctx.trace.record(OpTag::SpSelect, marked.id, TraceKind::Read,
                     static_cast<u32>(r));
    const SecureValue m = marked.ret[r];
    for (i64 j = 0; j < cs; ++j) {
      const SecureValue here =
          g_and(ctx, m, g_eq(ctx, cursor, ctx.share(static_cast<u32>(j))));
      for (size_t c = 0; c < out.width(); ++c) {
        out.cell(static_cast<size_t>(j), c) =
            g_mux(ctx, here, marked.cell(r, c),
                  out.cell(static_cast<size_t>(j), c));
      }
      out.ret[static_cast<size_t>(j)] =
          g_mux(ctx, here, m, out.ret[static_cast<size_t>(j)]);
      ctx.trace.record(OpTag::SpSelect, out.id, TraceKind::Write,
                       static_cast<u32>(j));
    }
    cursor = g_add(ctx, cursor, g_mux(ctx, m, ctx.share(1), ctx.share(0)));
  }
  return out;
}

SecureArray dc_select(ExecutionContext& ctx, const IndexedStore& store,
                      const std::string& alias, i64 a, i64 b,
                      const Predicate& qualified_predicate, bool refine) {
  SecureArray loaded = idx_acc(ctx, store, static_cast<size_t>(a),
                               static_cast<size_t>(b), alias);
  if (!refine || qualified_predicate.empty()) return loaded;
  return select(ctx, loaded, qualified_predicate);
}

std::vector<i64> mx_bucket_bounds(const MxJoinParams& params) {
  const size_t m = params.left.intervals.size();
  if (params.right.intervals.size() != m) {
    throw InvalidParameter("mx_join sides disagree on bucket count");
  }
  std::vector<i64> cs(m, 0);
  for (size_t i = 0; i < m; ++i) {
    const i64 wl = params.left.intervals[i].second -
                   params.left.intervals[i].first;
    const i64 wr = params.right.intervals[i].second -
                   params.right.intervals[i].first;
    // min(wl/mfl, wr/mfr) * mfl * mfr over the rationals, which is
    // min(wl*mfr, wr*mfl); an integer, and an upper bound on the true
    // bucket join size because each noisy MF dominates the true one.
    i64 bound = std::min(wl * params.right.mf_hat, wr * params.left.mf_hat);
    bound = std::min(bound, wl * wr);
    cs[i] = std::max<i64>(0, bound);
  }
  return cs;
}

namespace {

SecureArray slice_rows(ExecutionContext& ctx, const SecureArray& a, i64 lo,
                       i64 hi) {
  SecureArray out;
  out.id = ctx.new_array_id();
  out.schema = a.schema;
  out.validated = a.validated;
  for (i64 r = lo; r < hi; ++r) {
    ctx.trace.record(OpTag::MxJoin, a.id, TraceKind::Read,
                     static_cast<u32>(r));
    for (size_t c = 0; c < a.width(); ++c) {
      out.cells.push_back(a.cell(static_cast<size_t>(r), c));
    }
    out.ret.push_back(a.ret[static_cast<size_t>(r)]);
  }
  return out;
}

void append_rows(ExecutionContext& ctx, SecureArray& dst,
                 const SecureArray& src) {
  for (size_t r = 0; r < src.rows(); ++r) {
    for (size_t c = 0; c < src.width(); ++c) {
      dst.cells.push_back(src.cell(r, c));
    }
    dst.ret.push_back(src.ret[r]);
    ctx.trace.record(OpTag::MxJoin, dst.id, TraceKind::Write,
                     static_cast<u32>(dst.ret.size() - 1));
  }
}

}  // namespace

MxJoinResult mx_join(ExecutionContext& ctx, const SecureArray& left,
                     const SecureArray& right, const MxJoinParams& params) {
  if (params.left.intervals.empty() ||
      params.left.intervals.size() != params.right.intervals.size()) {
    throw NotApplicable("mx_join prerequisites missing: no usable index");
  }
  const std::vector<i64> cs = mx_bucket_bounds(params);

  const auto prepare = [&](const SecureArray& in,
                           const MxSideParams& side) -> SecureArray {
    if (side.presorted) {
      SecureArray copy = in;
      copy.id = ctx.new_array_id();
      return copy;
    }
    SortSpec spec;
    spec.valid_first = true;
    spec.keys.push_back({in.col(side.key_col), true});
    return oblivious_sort(ctx, in, spec, OpTag::MxJoin);
  };
  SecureArray ls = prepare(left, params.left);
  SecureArray rs = prepare(right, params.right);

  SecureArray out;
  out.id = ctx.new_array_id();
  out.schema = left.schema;
  out.schema.insert(out.schema.end(), right.schema.begin(),
                    right.schema.end());
  out.validated = true;

  const std::vector<std::pair<std::string, std::string>>& eqs = params.eq_cols;

  const size_t m = cs.size();
  std::vector<std::pair<i64, i64>> out_intervals(m);
  std::vector<i64> bucket_marked(m, 0);
  i64 offset = 0;
  for (size_t i = 0; i < m; ++i) {
    out_intervals[i] = {offset, offset + cs[i]};
    const auto [llo, lhi] = params.left.intervals[i];
    const auto [rlo, rhi] = params.right.intervals[i];
    if (cs[i] == 0 || llo >= lhi || rlo >= rhi) {
      // Publicly-zero-width bucket: nothing to materialize.
      offset += cs[i];
      continue;
    }
    SecureArray la = slice_rows(ctx, ls, llo,
                                std::min(lhi, static_cast<i64>(ls.rows())));
    SecureArray ra = slice_rows(ctx, rs, rlo,
                                std::min(rhi, static_cast<i64>(rs.rows())));
    SecureArray joined = join_cartesian(ctx, la, ra, eqs);
    // Restrict matches to keys inside bin i so tuples duplicated by
    // overlapping slices join in exactly one bucket.
    Predicate bin_pred;
    bin_pred.conjuncts.push_back(
        {params.left.key_col,
         ValueSet::range(params.bin_edges[i], params.bin_edges[i + 1] - 1)});
    joined = select(ctx, joined, bin_pred);
    bucket_marked[i] = marked_count(joined);
    SecureArray compacted =
        opac(ctx, joined, std::min<i64>(cs[i],
                                        static_cast<i64>(joined.rows())));
    // opac may return fewer than cs[i] rows only when the bucket product is
    // smaller; pad with invalid rows to keep bucket extents public.
    append_rows(ctx, out, compacted);
    for (i64 pad = static_cast<i64>(compacted.rows()); pad < cs[i]; ++pad) {
      for (size_t c = 0; c < out.width(); ++c) out.cells.push_back(ctx.share(0));
      out.ret.push_back(ctx.share(0));
      ctx.trace.record(OpTag::MxJoin, out.id, TraceKind::Write,
                       static_cast<u32>(out.ret.size() - 1));
    }
    offset += cs[i];
  }
  ctx.stats.alloc_cells(out.cells.size() + out.ret.size());

  MxJoinResult res;
  res.out = std::move(out);
  res.cs = cs;
  res.bucket_marked = std::move(bucket_marked);
  res.annotation.join_attr = params.join_attr;
  res.annotation.key_cols = {params.left.key_col, params.right.key_col};
  res.annotation.mf_ready = true;
  res.annotation.mf_hat = params.left.mf_hat * params.right.mf_hat;
  res.annotation.bin_edges = params.bin_edges;
  res.annotation.intervals = std::move(out_intervals);
  return res;
}

}  // namespace synoq
