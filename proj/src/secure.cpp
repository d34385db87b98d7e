#include "synoq/secure.hpp"

#include <algorithm>
#include <cmath>

namespace synoq {

const char* op_tag_name(OpTag tag) {
  switch (tag) {
    case OpTag::SeqAcc: return "seq_acc";
    case OpTag::IdxAcc: return "idx_acc";
    case OpTag::Select: return "select";
    case OpTag::Project: return "project";
    case OpTag::Join: return "join";
    case OpTag::Aggregate: return "aggregate";
    case OpTag::Distinct: return "distinct";
    case OpTag::GroupBy: return "group_by";
    case OpTag::Sort: return "sort";
    case OpTag::Opac: return "opac";
    case OpTag::SpSelect: return "sp_select";
    case OpTag::MxJoin: return "mx_join";
  }
  return "?";
}

const char* trace_kind_name(TraceKind kind) {
  switch (kind) {
    case TraceKind::Read: return "read";
    case TraceKind::Write: return "write";
    case TraceKind::CompareSwap: return "cswap";
  }
  return "?";
}

void TraceLog::record(OpTag op, u32 array_id, TraceKind kind, u32 pos,
                      u32 pos2) {
  if (!enabled) return;
  // FNV-1a over the packed event.
  const u64 words[2] = {
      (static_cast<u64>(static_cast<u8>(op)) << 40) |
          (static_cast<u64>(static_cast<u8>(kind)) << 32) | array_id,
      (static_cast<u64>(pos) << 32) | pos2};
  for (u64 w : words) {
    for (int i = 0; i < 8; ++i) {
      digest_ ^= (w >> (8 * i)) & 0xff;
      digest_ *= 1099511628211ull;
    }
  }
  ++count_;
  if (keep_events) events_.push_back({op, array_id, kind, pos, pos2});
}

void TraceLog::clear() {
  events_.clear();
  digest_ = 1469598103934665603ull;
  count_ = 0;
}

void TraceLog::serialize(std::ostream& out) const {
  for (const Event& e : events_) {
    out << op_tag_name(e.op) << ' ' << e.array_id << ' '
        << trace_kind_name(e.kind) << ' ' << e.pos;
    if (e.kind == TraceKind::CompareSwap) out << ',' << e.pos2;
    out << '\n';
  }
}

int SecureArray::col(const std::string& name) const {
  for (size_t i = 0; i < schema.size(); ++i) {
    if (schema[i] == name) return static_cast<int>(i);
  }
  throw SchemaError("secure array has no column '" + name + "'");
}

SecureValue ExecutionContext::share(u32 value) {
  const u32 a = static_cast<u32>(rng_());
  return SecureValue{a, value ^ a};
}

SecureArray ExecutionContext::make_array(std::vector<std::string> schema,
                                         size_t rows) {
  SecureArray out;
  out.id = new_array_id();
  out.schema = std::move(schema);
  out.cells.resize(rows * out.schema.size());
  out.ret.resize(rows);
  for (SecureValue& v : out.cells) v = share(0);
  for (SecureValue& v : out.ret) v = share(0);
  stats.alloc_cells(out.cells.size() + out.ret.size());
  return out;
}

namespace {

inline SecureValue reshare(ExecutionContext& ctx, u32 value) {
  return ctx.share(value);
}

}  // namespace

GateOp gate_op_from_string(const std::string& name) {
  if (name == "eq") return GateOp::Eq;
  if (name == "lt") return GateOp::Lt;
  if (name == "add") return GateOp::Add;
  if (name == "mul") return GateOp::Mul;
  if (name == "and") return GateOp::And;
  if (name == "or") return GateOp::Or;
  if (name == "not") return GateOp::Not;
  if (name == "select-bit") return GateOp::SelectBit;
  throw InvalidParameter("unsupported gate op '" + name + "'");
}

SecureValue ideal_gate(ExecutionContext& ctx, GateOp op,
                       std::span<const SecureValue> in) {
  const auto need = [&](size_t n) {
    if (in.size() != n) {
      throw InvalidParameter("gate arity mismatch");
    }
  };
  switch (op) {
    case GateOp::Eq: need(2); return g_eq(ctx, in[0], in[1]);
    case GateOp::Lt: need(2); return g_lt(ctx, in[0], in[1]);
    case GateOp::Add: need(2); return g_add(ctx, in[0], in[1]);
    case GateOp::Mul: need(2); return g_mul(ctx, in[0], in[1]);
    case GateOp::And: need(2); return g_and(ctx, in[0], in[1]);
    case GateOp::Or: need(2); return g_or(ctx, in[0], in[1]);
    case GateOp::Not: need(1); return g_not(ctx, in[0]);
    case GateOp::SelectBit: need(3); return g_mux(ctx, in[0], in[1], in[2]);
  }
  throw InvalidParameter("unsupported gate op");
}

SecureValue g_eq(ExecutionContext& ctx, SecureValue a, SecureValue b) {
  ++ctx.stats.gate_count;
  return reshare(ctx, ExecutionContext::reconstruct(a) ==
                              ExecutionContext::reconstruct(b)
                          ? 1u
                          : 0u);
}

SecureValue g_lt(ExecutionContext& ctx, SecureValue a, SecureValue b) {
  ++ctx.stats.gate_count;
  return reshare(ctx, ExecutionContext::reconstruct(a) <
                              ExecutionContext::reconstruct(b)
                          ? 1u
                          : 0u);
}

SecureValue g_add(ExecutionContext& ctx, SecureValue a, SecureValue b) {
  ++ctx.stats.gate_count;
  return reshare(ctx, ExecutionContext::reconstruct(a) +
                          ExecutionContext::reconstruct(b));
}

SecureValue g_mul(ExecutionContext& ctx, SecureValue a, SecureValue b) {
  ++ctx.stats.gate_count;
  return reshare(ctx, ExecutionContext::reconstruct(a) *
                          ExecutionContext::reconstruct(b));
}

SecureValue g_and(ExecutionContext& ctx, SecureValue a, SecureValue b) {
  ++ctx.stats.gate_count;
  return reshare(ctx, (ExecutionContext::reconstruct(a) & 1u) &
                          (ExecutionContext::reconstruct(b) & 1u));
}

SecureValue g_or(ExecutionContext& ctx, SecureValue a, SecureValue b) {
  ++ctx.stats.gate_count;
  return reshare(ctx, (ExecutionContext::reconstruct(a) & 1u) |
                          (ExecutionContext::reconstruct(b) & 1u));
}

SecureValue g_not(ExecutionContext& ctx, SecureValue a) {
  ++ctx.stats.gate_count;
  return reshare(ctx, 1u - (ExecutionContext::reconstruct(a) & 1u));
}

SecureValue g_mux(ExecutionContext& ctx, SecureValue b, SecureValue x,
                  SecureValue y) {
  ++ctx.stats.gate_count;
  return reshare(ctx, (ExecutionContext::reconstruct(b) & 1u)
                          ? ExecutionContext::reconstruct(x)
                          : ExecutionContext::reconstruct(y));
}

SecureValue effective_ret(ExecutionContext& ctx, const SecureArray& a,
                          size_t row) {
  if (a.validated) return a.ret[row];
  return ctx.share(1);
}

SecureArray seq_acc(ExecutionContext& ctx, const Relation& relation,
                    const std::string& alias) {
  std::vector<std::string> schema;
  for (const Column& c : relation.schema.columns) {
    schema.push_back(alias.empty() ? c.name : alias + "." + c.name);
  }
  SecureArray out;
  out.id = ctx.new_array_id();
  out.schema = std::move(schema);
  const size_t w = out.schema.size();
  out.cells.reserve(relation.row_count() * w);
  out.ret.reserve(relation.row_count());
  for (size_t r = 0; r < relation.row_count(); ++r) {
    ctx.trace.record(OpTag::SeqAcc, out.id, TraceKind::Read,
                     static_cast<u32>(r));
    for (size_t c = 0; c < w; ++c) {
      const i64 v = relation.at(r, c);
      if (v < 0 || v > 0xFFFFFFFFll) {
        throw SchemaError("value does not fit the 32-bit ring; split columns");
      }
      out.cells.push_back(ctx.share(static_cast<u32>(v)));
    }
    out.ret.push_back(ctx.share(0));
  }
  out.validated = false;
  ctx.stats.alloc_cells(out.cells.size() + out.ret.size());
  return out;
}

SecureArray idx_acc(ExecutionContext& ctx, const Relation& sorted_relation,
                    size_t a, size_t b, const std::string& alias) {
  if (a > b || b > sorted_relation.row_count()) {
    throw InvalidParameter("idx_acc interval out of range");
  }
  std::vector<std::string> schema;
  for (const Column& c : sorted_relation.schema.columns) {
    schema.push_back(alias.empty() ? c.name : alias + "." + c.name);
  }
  SecureArray out;
  out.id = ctx.new_array_id();
  out.schema = std::move(schema);
  const size_t w = out.schema.size();
  for (size_t r = a; r < b; ++r) {
    ctx.trace.record(OpTag::IdxAcc, out.id, TraceKind::Read,
                     static_cast<u32>(r));
    for (size_t c = 0; c < w; ++c) {
      const i64 v = sorted_relation.at(r, c);
      if (v < 0 || v > 0xFFFFFFFFll) {
        throw SchemaError("value does not fit the 32-bit ring; split columns");
      }
      out.cells.push_back(ctx.share(static_cast<u32>(v)));
    }
    out.ret.push_back(ctx.share(1));
  }
  out.validated = true;
  ctx.stats.alloc_cells(out.cells.size() + out.ret.size());
  return out;
}

namespace {

// Sort working row: payload cells + ret + key words + original position.
struct SortMatrix {
  size_t rows = 0;
  size_t payload = 0;  // cells per row (schema width)
  size_t keys = 0;     // comparison words per row
  std::vector<SecureValue> data;  // rows x (payload + 1 + keys + 1)

  size_t stride() const { return payload + 1 + keys + 1; }
  SecureValue* row(size_t r) { return data.data() + r * stride(); }
  SecureValue& ret(size_t r) { return data[r * stride() + payload]; }
  SecureValue& key(size_t r, size_t k) {
    return data[r * stride() + payload + 1 + k];
  }
  SecureValue& pos(size_t r) { return data[r * stride() + payload + 1 + keys]; }
};

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Strict lexicographic less-than over key words and the position word.
SecureValue lex_lt(ExecutionContext& ctx, SortMatrix& m, size_t i, size_t j) {
  SecureValue lt = ctx.share(0);
  SecureValue eq = ctx.share(1);
  for (size_t k = 0; k < m.keys; ++k) {
    SecureValue l = g_lt(ctx, m.key(i, k), m.key(j, k));
    lt = g_or(ctx, lt, g_and(ctx, eq, l));
    eq = g_and(ctx, eq, g_eq(ctx, m.key(i, k), m.key(j, k)));
  }
  SecureValue lp = g_lt(ctx, m.pos(i), m.pos(j));
  return g_or(ctx, lt, g_and(ctx, eq, lp));
}

void cond_swap_rows(ExecutionContext& ctx, SortMatrix& m, SecureValue swap,
                    size_t i, size_t j) {
  SecureValue* a = m.row(i);
  SecureValue* b = m.row(j);
  for (size_t c = 0; c < m.stride(); ++c) {
    SecureValue na = g_mux(ctx, swap, b[c], a[c]);
    SecureValue nb = g_mux(ctx, swap, a[c], b[c]);
    a[c] = na;
    b[c] = nb;
  }
}

}  // namespace

u64 bitonic_compare_count(size_t n) {
  if (n <= 1) return 0;
  const size_t padded = next_pow2(n);
  u64 m = 0;
  for (size_t p = padded; p > 1; p >>= 1) ++m;
  return (m * (m + 1) / 2) * (padded / 2);
}

SecureArray oblivious_sort(ExecutionContext& ctx, const SecureArray& input,
                           const SortSpec& spec, OpTag tag) {
  const size_t n = input.rows();
  if (n <= 1) {
    SecureArray out = input;
    out.id = ctx.new_array_id();
    return out;
  }
  const size_t padded = next_pow2(n);
  const size_t key_count =
      (spec.valid_first ? 1 : 0) + spec.keys.size();

  SortMatrix m;
  m.rows = padded;
  m.payload = input.width();
  m.keys = key_count;
  m.data.resize(padded * m.stride());

  for (size_t r = 0; r < padded; ++r) {
    if (r < n) {
      for (size_t c = 0; c < m.payload; ++c) {
        m.row(r)[c] = input.cell(r, c);
      }
      m.ret(r) = input.ret[r];
      size_t k = 0;
      if (spec.valid_first) {
        // 1 - effective_ret ascending puts valid rows first.
        SecureValue er = effective_ret(ctx, input, r);
        m.key(r, k++) = g_add(ctx, ctx.share(1),
                              g_mul(ctx, ctx.share(0xFFFFFFFFu), er));
      }
      for (const SortKey& sk : spec.keys) {
        SecureValue v =
            sk.col == kRetKey ? input.ret[r] : input.cell(r, sk.col);
        if (!sk.ascending) {
          // complement maps unsigned ascending to descending
          v = g_add(ctx, ctx.share(0xFFFFFFFFu),
                    g_mul(ctx, ctx.share(0xFFFFFFFFu), v));
        }
        m.key(r, k++) = v;
      }
      m.pos(r) = ctx.share(static_cast<u32>(r));
    } else {
      // Padding: sentinel max keys, ret = 0; stripped after the network.
      for (size_t c = 0; c < m.payload; ++c) m.row(r)[c] = ctx.share(0);
      m.ret(r) = ctx.share(0);
      for (size_t k = 0; k < m.keys; ++k) m.key(r, k) = ctx.share(0xFFFFFFFFu);
      m.pos(r) = ctx.share(static_cast<u32>(r));
    }
  }

  // Bitonic network; the (i, l) compare-swap schedule depends only on the
  // padded length.
  for (size_t k = 2; k <= padded; k <<= 1) {
    for (size_t j = k >> 1; j > 0; j >>= 1) {
      for (size_t i = 0; i < padded; ++i) {
        const size_t l = i ^ j;
        if (l <= i) continue;
        const bool ascending = (i & k) == 0;
        ctx.trace.record(tag, input.id, TraceKind::CompareSwap,
                         static_cast<u32>(i), static_cast<u32>(l));
        SecureValue swap = ascending ? lex_lt(ctx, m, l, i)
                                     : lex_lt(ctx, m, i, l);
        cond_swap_rows(ctx, m, swap, i, l);
      }
    }
  }

  SecureArray out;
  out.id = ctx.new_array_id();
  out.schema = input.schema;
  out.validated = input.validated;
  out.cells.reserve(n * m.payload);
  out.ret.reserve(n);
  for (size_t r = 0; r < n; ++r) {
    for (size_t c = 0; c < m.payload; ++c) out.cells.push_back(m.row(r)[c]);
    out.ret.push_back(m.ret(r));
  }
  ctx.stats.alloc_cells(out.cells.size() + out.ret.size());
  return out;
}

SecureArray opac(ExecutionContext& ctx, const SecureArray& input, i64 k) {
  if (k < 0) throw InvalidParameter("opac with negative k");
  if (k > static_cast<i64>(input.rows())) {
    throw InvalidParameter("opac k exceeds array length");
  }
  SortSpec spec;
  spec.valid_first = true;
  SecureArray sorted = oblivious_sort(ctx, input, spec, OpTag::Opac);
  SecureArray out;
  out.id = ctx.new_array_id();
  out.schema = input.schema;
  out.validated = true;
  for (i64 r = 0; r < k; ++r) {
    ctx.trace.record(OpTag::Opac, sorted.id, TraceKind::Read,
                     static_cast<u32>(r));
    for (size_t c = 0; c < input.width(); ++c) {
      out.cells.push_back(sorted.cell(static_cast<size_t>(r), c));
    }
    out.ret.push_back(sorted.ret[static_cast<size_t>(r)]);
  }
  ctx.stats.alloc_cells(out.cells.size() + out.ret.size());
  return out;
}

i64 marked_count(const SecureArray& a) {
  if (!a.validated) return static_cast<i64>(a.rows());
  i64 n = 0;
  for (const SecureValue& r : a.ret) {
    n += ExecutionContext::reconstruct(r) & 1u;
  }
  return n;
}

}  // namespace synoq
