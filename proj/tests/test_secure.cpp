#include <set>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "synoq/secure.hpp"

using namespace synoq;
using namespace synoq::testing;

TEST_CASE("share / reconstruct round trips") {
  ExecutionContext ctx(1);
  CHECK(ExecutionContext::reconstruct(ctx.share(0)) == 0u);
  CHECK(ExecutionContext::reconstruct(ctx.share(0xDEADBEEFu)) == 0xDEADBEEFu);
  for (u32 v : {1u, 42u, 0xFFFFFFFFu}) {
    CHECK(ExecutionContext::reconstruct(ctx.share(v)) == v);
  }
}

TEST_CASE("fresh sharing draws fresh randomness") {
  ExecutionContext ctx(2);
  std::set<u32> shares;
  const int n = 100000;
  for (int i = 0; i < n; ++i) shares.insert(ctx.share(7).share_a);
  // collisions over 1e5 draws from 2^32 are rare; allow a generous margin
  CHECK(static_cast<int>(shares.size()) >= n - 10);
}

TEST_CASE("ideal gates compute ring semantics") {
  ExecutionContext ctx(3);
  auto v = [&](u32 x) { return ctx.share(x); };
  auto rec = [](SecureValue s) { return ExecutionContext::reconstruct(s); };
  CHECK(rec(g_eq(ctx, v(5), v(5))) == 1u);
  CHECK(rec(g_eq(ctx, v(5), v(6))) == 0u);
  CHECK(rec(g_lt(ctx, v(3), v(7))) == 1u);
  CHECK(rec(g_lt(ctx, v(7), v(3))) == 0u);
  CHECK(rec(g_add(ctx, v(0xFFFFFFFFu), v(2))) == 1u);  // wraps mod 2^32
  CHECK(rec(g_mul(ctx, v((1u << 31) + 5u), v(2))) == 10u);  // wraps
  CHECK(rec(g_and(ctx, v(1), v(1))) == 1u);
  CHECK(rec(g_or(ctx, v(0), v(1))) == 1u);
  CHECK(rec(g_not(ctx, v(0))) == 1u);
  Rng rng = seeded_rng(9);
  for (int i = 0; i < 100; ++i) {
    const u32 x = static_cast<u32>(rng());
    const u32 y = static_cast<u32>(rng());
    for (u32 b : {0u, 1u}) {
      CHECK(rec(g_mux(ctx, v(b), v(x), v(y))) == (b ? x : y));
    }
  }
}

TEST_CASE("gate dispatcher validates op and arity") {
  ExecutionContext ctx(4);
  const SecureValue a = ctx.share(1), b = ctx.share(2);
  const SecureValue in2[] = {a, b};
  CHECK(ExecutionContext::reconstruct(
            ideal_gate(ctx, GateOp::Add, std::span(in2, 2))) == 3u);
  CHECK_THROWS_AS(ideal_gate(ctx, GateOp::Add, std::span(in2, 1)),
                  InvalidParameter);
  CHECK_THROWS_AS(gate_op_from_string("xor"), InvalidParameter);
  CHECK(gate_op_from_string("select-bit") == GateOp::SelectBit);
}

TEST_CASE("seq_acc trace is positional and content independent") {
  Relation r1 = make_relation("t", {{"a", {0, 9}}}, {{1}, {2}, {3}});
  Relation r2 = make_relation("t", {{"a", {0, 9}}}, {{9}, {0}, {5}});

  ExecutionContext c1(5), c2(5);
  SecureArray a1 = seq_acc(c1, r1);
  SecureArray a2 = seq_acc(c2, r2);
  CHECK(c1.trace.size() == 3);
  CHECK(c1.trace.digest() == c2.trace.digest());
  CHECK(a1.validated == false);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(c1.trace.events()[i].kind == TraceKind::Read);
    CHECK(c1.trace.events()[i].pos == i);
    CHECK(ExecutionContext::reconstruct(a1.ret[i]) == 0u);
  }

  Relation empty = make_relation("t", {{"a", {0, 9}}}, {});
  ExecutionContext c3(5);
  SecureArray a3 = seq_acc(c3, empty);
  CHECK(a3.rows() == 0);
  CHECK(c3.trace.size() == 0);
}

TEST_CASE("idx_acc loads an interval with bin-granular validity") {
  Relation rel = make_relation(
      "t", {{"a", {0, 9}}}, {{0}, {1}, {2}, {3}, {4}, {5}, {6}, {7}});
  ExecutionContext ctx(6);
  SecureArray full = idx_acc(ctx, rel, 0, rel.row_count());
  CHECK(full.rows() == 8);
  CHECK(full.validated);
  for (size_t r = 0; r < 8; ++r) {
    CHECK(ExecutionContext::reconstruct(full.ret[r]) == 1u);
  }
  SecureArray one = idx_acc(ctx, rel, 5, 6);
  CHECK(one.rows() == 1);
  CHECK(ExecutionContext::reconstruct(one.cell(0, 0)) == 5u);
  CHECK_THROWS_AS(idx_acc(ctx, rel, 4, 99), InvalidParameter);

  // trace depends only on the interval, not stored values
  Relation other = make_relation(
      "t", {{"a", {0, 9}}}, {{9}, {9}, {9}, {9}, {9}, {9}, {9}, {9}});
  ExecutionContext ca(7), cb(7);
  idx_acc(ca, rel, 2, 6);
  idx_acc(cb, other, 2, 6);
  CHECK(ca.trace.digest() == cb.trace.digest());
}

namespace {

SecureArray load_column(ExecutionContext& ctx, const std::vector<i64>& keys,
                        bool validated = false,
                        const std::vector<int>& marks = {}) {
  Relation rel = make_relation("t", {{"k", {0, 1000000}}}, {});
  for (i64 k : keys) rel.append_row({k});
  SecureArray a = seq_acc(ctx, rel);
  if (validated) {
    a.validated = true;
    for (size_t r = 0; r < a.rows(); ++r) {
      a.ret[r] = ctx.share(marks.empty() ? 1u : static_cast<u32>(marks[r]));
    }
  }
  return a;
}

std::vector<i64> column_values(const SecureArray& a) {
  std::vector<i64> out;
  for (size_t r = 0; r < a.rows(); ++r) {
    out.push_back(ExecutionContext::reconstruct(a.cell(r, 0)));
  }
  return out;
}

}  // namespace

TEST_CASE("oblivious sort orders keys") {
  ExecutionContext ctx(8);
  SecureArray a = load_column(ctx, {3, 1, 2});
  SortSpec spec;
  spec.keys = {{0, true}};
  SecureArray sorted = oblivious_sort(ctx, a, spec);
  CHECK(column_values(sorted) == std::vector<i64>{1, 2, 3});
}

TEST_CASE("oblivious sort matches a plaintext sort oracle") {
  Rng rng = seeded_rng(10);
  for (int trial = 0; trial < 60; ++trial) {
    const size_t n = 1 + rng() % 50;
    std::vector<i64> keys(n);
    for (i64& k : keys) k = static_cast<i64>(rng() % 40);
    ExecutionContext ctx(trial);
    SecureArray a = load_column(ctx, keys);
    SortSpec spec;
    spec.keys = {{0, trial % 2 == 0}};
    SecureArray sorted = oblivious_sort(ctx, a, spec);
    std::vector<i64> expected = keys;
    std::stable_sort(expected.begin(), expected.end());
    if (trial % 2 != 0) std::reverse(expected.begin(), expected.end());
    CHECK(column_values(sorted) == expected);
  }
}

TEST_CASE("sort trace depends on the length only") {
  ExecutionContext c1(11), c2(11);
  SecureArray a = load_column(c1, {5, 4, 3, 2, 1, 0});
  SecureArray b = load_column(c2, {0, 1, 2, 3, 4, 5});  // already sorted
  SortSpec spec;
  spec.keys = {{0, true}};
  oblivious_sort(c1, a, spec);
  oblivious_sort(c2, b, spec);
  CHECK(c1.trace.digest() == c2.trace.digest());
  CHECK(c1.trace.size() == c2.trace.size());
}

TEST_CASE("bitonic network size is (m(m+1)/2) * 2^(m-1)") {
  for (size_t m = 1; m <= 6; ++m) {
    const size_t n = size_t{1} << m;
    CHECK(bitonic_compare_count(n) == (m * (m + 1) / 2) * (n / 2));
    ExecutionContext ctx(12);
    std::vector<i64> keys(n, 1);
    SecureArray a = load_column(ctx, keys);
    SortSpec spec;
    spec.keys = {{0, true}};
    oblivious_sort(ctx, a, spec);
    u64 cswaps = 0;
    for (const auto& e : ctx.trace.events()) {
      if (e.kind == TraceKind::CompareSwap) ++cswaps;
    }
    CHECK(cswaps == bitonic_compare_count(n));
  }
}

TEST_CASE("opac keeps every marked tuple when k is large enough") {
  ExecutionContext ctx(13);
  SecureArray a = load_column(ctx, {10, 11, 12, 13, 14, 15, 16, 17}, true,
                              {0, 1, 0, 0, 1, 0, 1, 0});
  SecureArray out = opac(ctx, a, 5);
  CHECK(out.rows() == 5);
  auto rows = marked_rows(out);
  CHECK(rows == std::vector<std::vector<i64>>{{11}, {14}, {16}});

  CHECK(opac(ctx, a, 0).rows() == 0);
  CHECK_THROWS_AS(opac(ctx, a, -1), InvalidParameter);
  CHECK_THROWS_AS(opac(ctx, a, 9), InvalidParameter);
}

TEST_CASE("opac is lossless exactly when k covers the marked count") {
  Rng rng = seeded_rng(14);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<i64> keys(32);
    std::vector<int> marks(32);
    std::vector<std::vector<i64>> expected;
    for (size_t i = 0; i < 32; ++i) {
      keys[i] = static_cast<i64>(rng() % 100);
      marks[i] = static_cast<int>(rng() % 2);
      if (marks[i]) expected.push_back({keys[i]});
    }
    std::sort(expected.begin(), expected.end());
    const i64 marked = static_cast<i64>(expected.size());
    for (i64 k = 0; k <= 32; ++k) {
      ExecutionContext ctx(100 + trial);
      SecureArray a = load_column(ctx, keys, true, marks);
      SecureArray out = opac(ctx, a, k);
      const auto got = marked_rows(out);
      if (k >= marked) {
        CHECK(got == expected);
      } else {
        CHECK(static_cast<i64>(got.size()) == k);
      }
    }
  }
}

TEST_CASE("trace serialization is line-exact") {
  ExecutionContext ctx(15);
  Relation rel = make_relation("t", {{"a", {0, 9}}}, {{1}, {2}});
  seq_acc(ctx, rel);
  std::ostringstream s;
  ctx.trace.serialize(s);
  CHECK(s.str() == "seq_acc 0 read 0\nseq_acc 0 read 1\n");
}
