#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "synoq/config.hpp"
#include "synoq/schema.hpp"

namespace synoq {

// 2-of-2 XOR share of one 32-bit ring word.
struct SecureValue {
  u32 share_a = 0;
  u32 share_b = 0;
};

enum class OpTag : u8 {
  SeqAcc,
  IdxAcc,
  Select,
  Project,
  Join,
  Aggregate,
  Distinct,
  GroupBy,
  Sort,
  Opac,
  SpSelect,
  MxJoin,
};

enum class TraceKind : u8 { Read, Write, CompareSwap };

const char* op_tag_name(OpTag tag);
const char* trace_kind_name(TraceKind kind);

// Append-only record of every array access an execution makes. The stream
// must be a deterministic function of public inputs (plan, array lengths,
// synopsis-derived parameters); that property is what the paired-execution
// harness asserts. A streaming FNV-1a digest allows equality checks without
// retaining events for large runs.
class TraceLog {
 public:
  struct Event {
    OpTag op;
    u32 array_id;
    TraceKind kind;
    u32 pos;
    u32 pos2;  // second position of a compare-swap
  };

  bool enabled = true;
  bool keep_events = true;

  void record(OpTag op, u32 array_id, TraceKind kind, u32 pos, u32 pos2 = 0);
  u64 size() const { return count_; }
  u64 digest() const { return digest_; }
  const std::vector<Event>& events() const { return events_; }
  void clear();

  // Line-delimited text: `op_tag array_id kind pos[,pos2]`. Requires
  // keep_events; bit-exact for trace diffing.
  void serialize(std::ostream& out) const;

 private:
  std::vector<Event> events_;
  u64 digest_ = 1469598103934665603ull;  // FNV-1a offset basis
  u64 count_ = 0;
};

// Simulated secret-shared tuple array. Row count and schema are public
// metadata; `validated` records (publicly, as part of the plan) whether the
// ret bits have been assigned yet. Fresh loads carry ret = 0 and validated =
// false; consumers treat unvalidated rows as all-valid.
struct SecureArray {
  u32 id = 0;
  std::vector<std::string> schema;
  std::vector<SecureValue> cells;  // rows x schema.size(), row major
  std::vector<SecureValue> ret;    // one validity bit per row
  bool validated = false;

  size_t rows() const { return ret.size(); }
  size_t width() const { return schema.size(); }
  int col(const std::string& name) const;
  SecureValue& cell(size_t r, size_t c) { return cells[r * width() + c]; }
  const SecureValue& cell(size_t r, size_t c) const {
    return cells[r * width() + c];
  }
};

struct ExecStats {
  u64 gate_count = 0;
  u64 cells_allocated = 0;  // total secure cells materialized (memory proxy)

  void alloc_cells(u64 n) { cells_allocated += n; }
};

// Per-execution state: share randomness, trace, array ids, limits.
class ExecutionContext {
 public:
  explicit ExecutionContext(u64 seed, u64 join_cap = 2'000'000)
      : rng_(seed), join_cap_(join_cap) {}

  TraceLog trace;
  ExecStats stats;

  SecureValue share(u32 value);
  static u32 reconstruct(SecureValue v) { return v.share_a ^ v.share_b; }

  u64 join_cap() const { return join_cap_; }
  u32 new_array_id() { return next_array_id_++; }
  SecureArray make_array(std::vector<std::string> schema, size_t rows);
  Rng& rng() { return rng_; }

 private:
  Rng rng_;
  u64 join_cap_;
  u32 next_array_id_ = 0;
};

// ---- Ideal-functionality gates ------------------------------------------
// Stand-ins for per-gate MPC: each reconstructs internally, computes on
// 32-bit ring semantics, and re-shares the result freshly. Gates never log
// anything data-dependent; array accesses are traced by their callers.

enum class GateOp { Eq, Lt, Add, Mul, And, Or, Not, SelectBit };

GateOp gate_op_from_string(const std::string& name);
SecureValue ideal_gate(ExecutionContext& ctx, GateOp op,
                       std::span<const SecureValue> inputs);

SecureValue g_eq(ExecutionContext&, SecureValue a, SecureValue b);
SecureValue g_lt(ExecutionContext&, SecureValue a, SecureValue b);  // unsigned
SecureValue g_add(ExecutionContext&, SecureValue a, SecureValue b);
SecureValue g_mul(ExecutionContext&, SecureValue a, SecureValue b);
SecureValue g_and(ExecutionContext&, SecureValue a, SecureValue b);
SecureValue g_or(ExecutionContext&, SecureValue a, SecureValue b);
SecureValue g_not(ExecutionContext&, SecureValue a);
// b ? x : y for a 0/1 bit b.
SecureValue g_mux(ExecutionContext&, SecureValue b, SecureValue x,
                  SecureValue y);

// Effective validity of a row: the ret bit once the array has been
// validated, constant 1 before that.
SecureValue effective_ret(ExecutionContext& ctx, const SecureArray& a,
                          size_t row);

// ---- Data access ---------------------------------------------------------

// Load a whole relation via sequential scan; ret = 0, validated = false.
// Column names get an optional `alias.` prefix.
SecureArray seq_acc(ExecutionContext& ctx, const Relation& relation,
                    const std::string& alias = "");

// Load rows [a, b) of a sorted store; ret = 1 (bin-granular validity),
// validated = true. The trace depends only on (a, b).
SecureArray idx_acc(ExecutionContext& ctx, const Relation& sorted_relation,
                    size_t a, size_t b, const std::string& alias = "");

// ---- Oblivious sort and compaction ---------------------------------------

struct SortKey {
  int col = 0;            // column index; kRetKey sorts on the ret bit
  bool ascending = true;
};
inline constexpr int kRetKey = -1;

struct SortSpec {
  // When set, rows with effective ret = 1 come first (primary key).
  bool valid_first = false;
  std::vector<SortKey> keys;
  // Original position is always the final tiebreak, making the order total
  // and every oracle exact.
};

// Bitonic sort over the next power of two; padding rows carry sentinel max
// keys and ret = 0 and are stripped after the network runs. The
// compare-swap trace is a function of the input length only.
SecureArray oblivious_sort(ExecutionContext& ctx, const SecureArray& input,
                           const SortSpec& spec, OpTag tag = OpTag::Sort);

// Oblivious compaction: sort by ret (marked tuples first), keep the first k.
// Lossless iff k >= number of marked tuples; callers check and report.
SecureArray opac(ExecutionContext& ctx, const SecureArray& input, i64 k);

// Number of compare-swaps the sort network emits for n rows (after padding).
u64 bitonic_compare_count(size_t n);

// Simulation-side accounting helpers (reconstruct; never used by operators
// to steer execution).
i64 marked_count(const SecureArray& a);

}  // namespace synoq
