#include <map>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "synoq/operators.hpp"

using namespace synoq;
using namespace synoq::testing;

namespace {

SecureArray load(ExecutionContext& ctx, const Relation& rel,
                 const std::string& alias = "") {
  return seq_acc(ctx, rel, alias);
}

std::vector<std::vector<i64>> plain_filter(const Relation& rel,
                                           const Predicate& p) {
  std::vector<std::vector<i64>> out;
  for (size_t r = 0; r < rel.row_count(); ++r) {
    bool ok = true;
    for (const AttrCondition& c : p.conjuncts) {
      if (!c.vals.contains(
              rel.at(r, static_cast<size_t>(
                             rel.schema.column_index(c.attr))))) {
        ok = false;
      }
    }
    if (ok) out.push_back(rel.row(r));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("select marks exactly the matching tuples") {
  Rng rng = seeded_rng(31);
  Relation rel = random_relation("t", {"a", "b"}, 0, 9, 40, rng);
  ExecutionContext ctx(31);
  SecureArray in = load(ctx, rel);

  SUBCASE("all-match and none-match") {
    SecureArray all = select(ctx, in, {{{"a", ValueSet::range(0, 9)}}});
    CHECK(marked_count(all) == 40);
    SecureArray none = select(ctx, in, {{{"a", ValueSet::range(50, 60)}}});
    CHECK(marked_count(none) == 0);
  }
  SUBCASE("random predicates match the plaintext filter") {
    for (int t = 0; t < 20; ++t) {
      const i64 lo = static_cast<i64>(rng() % 10);
      Predicate p{{{"a", ValueSet::range(lo, lo + 2)},
                   {"b", ValueSet::range(0, 6)}}};
      SecureArray out = select(ctx, in, p);
      CHECK(marked_rows(out) == plain_filter(rel, p));
    }
  }
  SUBCASE("chained selects AND into the ret bit") {
    SecureArray first = select(ctx, in, {{{"a", ValueSet::range(0, 4)}}});
    SecureArray second = select(ctx, first, {{{"b", ValueSet::range(0, 4)}}});
    Predicate both{{{"a", ValueSet::range(0, 4)}, {"b", ValueSet::range(0, 4)}}};
    CHECK(marked_rows(second) == plain_filter(rel, both));
  }
  SUBCASE("schema mismatch is an error") {
    CHECK_THROWS_AS(select(ctx, in, {{{"zz", ValueSet::point(0)}}}),
                    SchemaError);
  }
}

TEST_CASE("project keeps ret and restricts columns") {
  Rng rng = seeded_rng(32);
  Relation rel = random_relation("t", {"a", "b", "c"}, 0, 9, 25, rng);
  ExecutionContext ctx(32);
  SecureArray in = select(ctx, load(ctx, rel), {{{"a", ValueSet::range(0, 4)}}});
  SecureArray pi = project(ctx, in, {"c", "a"});
  CHECK(pi.schema == std::vector<std::string>{"c", "a"});
  CHECK(pi.rows() == in.rows());
  // oracle comparison on the projected marked rows
  std::vector<std::vector<i64>> expected;
  for (const auto& row : plain_filter(rel, {{{"a", ValueSet::range(0, 4)}}})) {
    expected.push_back({row[2], row[0]});
  }
  std::sort(expected.begin(), expected.end());
  CHECK(marked_rows(pi) == expected);
  CHECK_THROWS_AS(project(ctx, in, {"zz"}), SchemaError);
}

TEST_CASE("cartesian join pads to the product and marks key matches") {
  Rng rng = seeded_rng(33);
  Relation ra = random_relation("r", {"k", "x"}, 0, 5, 8, rng);
  Relation rb = random_relation("s", {"k", "y"}, 0, 5, 7, rng);
  ExecutionContext ctx(33);
  SecureArray a = load(ctx, ra, "r");
  SecureArray b = load(ctx, rb, "s");
  SecureArray j = join_cartesian(ctx, a, b, {{"r.k", "s.k"}});
  CHECK(j.rows() == 56);
  std::vector<std::vector<i64>> expected;
  for (size_t i = 0; i < 8; ++i) {
    for (size_t k = 0; k < 7; ++k) {
      if (ra.at(i, 0) == rb.at(k, 0)) {
        expected.push_back({ra.at(i, 0), ra.at(i, 1), rb.at(k, 0), rb.at(k, 1)});
      }
    }
  }
  std::sort(expected.begin(), expected.end());
  CHECK(marked_rows(j) == expected);
}

TEST_CASE("disjoint key ranges join to nothing") {
  Rng rng = seeded_rng(34);
  Relation ra = random_relation("r", {"k"}, 0, 4, 6, rng);
  Relation rb = random_relation("s", {"k"}, 10, 14, 5, rng);
  ExecutionContext ctx(34);
  SecureArray j = join_cartesian(ctx, load(ctx, ra, "r"), load(ctx, rb, "s"),
                                 {{"r.k", "s.k"}});
  CHECK(j.rows() == 30);
  CHECK(marked_count(j) == 0);
}

TEST_CASE("join cap guards materialization") {
  Rng rng = seeded_rng(35);
  Relation ra = random_relation("r", {"k"}, 0, 4, 40, rng);
  ExecutionContext ctx(35, /*join_cap=*/1000);
  SecureArray a = load(ctx, ra, "r");
  SecureArray b = load(ctx, ra, "s");
  CHECK_THROWS_AS(join_cartesian(ctx, a, b, {}), JoinCapExceeded);
}

TEST_CASE("aggregates match plaintext on marked tuples") {
  Rng rng = seeded_rng(36);
  for (int t = 0; t < 10; ++t) {
    Relation rel = random_relation("t", {"a", "v"}, 0, 20, 30, rng);
    ExecutionContext ctx(36 + t);
    Predicate p{{{"a", ValueSet::range(0, 9)}}};
    SecureArray in = select(ctx, load(ctx, rel), p);
    const auto rows = plain_filter(rel, p);
    u32 sum = 0;
    i64 mn = -1, mx = -1;
    for (const auto& r : rows) {
      sum += static_cast<u32>(r[1]);
      mn = mn < 0 ? r[1] : std::min(mn, r[1]);
      mx = std::max(mx, r[1]);
    }
    auto rec = [](SecureValue v) { return ExecutionContext::reconstruct(v); };
    const AggregateResult c = aggregate(ctx, in, AggKind::Count, "");
    CHECK(rec(c.value) == rows.size());
    const AggregateResult s = aggregate(ctx, in, AggKind::Sum, "v");
    CHECK(rec(s.value) == sum);
    if (!rows.empty()) {
      CHECK(rec(aggregate(ctx, in, AggKind::Min, "v").value) ==
            static_cast<u32>(mn));
      CHECK(rec(aggregate(ctx, in, AggKind::Max, "v").value) ==
            static_cast<u32>(mx));
    } else {
      CHECK(rec(s.valid_count) == 0);
    }
  }
}

TEST_CASE("count over all-invalid input is zero") {
  Relation rel = make_relation("t", {{"a", {0, 9}}}, {{1}, {2}});
  ExecutionContext ctx(37);
  SecureArray in = select(ctx, load(ctx, rel), {{{"a", ValueSet::point(7)}}});
  CHECK(ExecutionContext::reconstruct(
            aggregate(ctx, in, AggKind::Count, "").value) == 0u);
}

TEST_CASE("distinct marks one representative per value") {
  ExecutionContext ctx(38);
  SUBCASE("all identical rows leave exactly one mark") {
    Relation rel = make_relation("t", {{"a", {0, 9}}}, {{3}, {3}, {3}, {3}});
    SecureArray d = distinct(ctx, load(ctx, rel), {"a"});
    CHECK(marked_count(d) == 1);
  }
  SUBCASE("all unique rows keep every valid mark") {
    Relation rel = make_relation("t", {{"a", {0, 9}}}, {{1}, {2}, {3}});
    SecureArray d = distinct(ctx, load(ctx, rel), {"a"});
    CHECK(marked_count(d) == 3);
  }
  SUBCASE("random arrays match the plaintext distinct oracle") {
    Rng rng = seeded_rng(39);
    for (int t = 0; t < 20; ++t) {
      Relation rel = random_relation("t", {"a", "b"}, 0, 6, 25, rng);
      Predicate p{{{"b", ValueSet::range(0, 3)}}};
      SecureArray in = select(ctx, load(ctx, rel), p);
      SecureArray d = distinct(ctx, in, {"a"});
      std::set<i64> expected;
      for (const auto& row : plain_filter(rel, p)) expected.insert(row[0]);
      CHECK(marked_count(d) == static_cast<i64>(expected.size()));
      std::set<i64> got;
      for (const auto& row : marked_rows(d)) got.insert(row[0]);
      CHECK(got == expected);
    }
  }
}

TEST_CASE("group_by_agg appends per-group aggregates") {
  Rng rng = seeded_rng(40);
  for (int t = 0; t < 15; ++t) {
    Relation rel = random_relation("t", {"g", "v", "f"}, 0, 5, 30, rng);
    ExecutionContext ctx(40 + t);
    Predicate p{{{"f", ValueSet::range(0, 2)}}};
    SecureArray in = select(ctx, load(ctx, rel), p);
    SecureArray g = group_by_agg(ctx, in, {"g"}, AggKind::Count, "g");
    std::map<i64, i64> expected;
    for (const auto& row : plain_filter(rel, p)) ++expected[row[0]];
    std::map<i64, i64> got;
    for (const auto& row : marked_rows(g)) {
      got[row[0]] = row.back();  // appended aggregate column
    }
    CHECK(got == expected);
    // non-representative rows carry the encoded dummy aggregate
    int dummies = 0;
    for (size_t r = 0; r < g.rows(); ++r) {
      const u32 a = ExecutionContext::reconstruct(g.cell(r, g.width() - 1));
      if (a == 0xFFFFFFFFu) ++dummies;
    }
    CHECK(dummies == static_cast<int>(g.rows()) -
                         static_cast<int>(expected.size()));
  }
}

TEST_CASE("op_select compacts losslessly at the estimated bound") {
  Rng rng = seeded_rng(41);
  for (int t = 0; t < 20; ++t) {
    Relation rel = random_relation("t", {"a", "j"}, 0, 15, 60, rng);
    Synopsis syn = gen_synopsis({AttrPair{"a", "j"}}, rel, 1.5, 5e-5, 8, rng);
    const i64 lo = static_cast<i64>(rng() % 16);
    Predicate p{{{"a", ValueSet::range(lo, lo + 3)}}};
    const i64 cs = card_est(60, p.conjuncts, &syn);
    ExecutionContext ctx(41 + t);
    SecureArray out = op_select(ctx, load(ctx, rel), p, cs);
    CHECK(static_cast<i64>(out.rows()) == std::min<i64>(cs, 60));
    CHECK(marked_rows(out) == plain_filter(rel, p));
  }
}

TEST_CASE("op_select with zero estimate returns an empty array") {
  Relation rel = make_relation("t", {{"a", {0, 9}}}, {{1}, {2}});
  ExecutionContext ctx(42);
  SecureArray out = op_select(ctx, load(ctx, rel),
                              {{{"a", ValueSet::point(7)}}}, 0);
  CHECK(out.rows() == 0);
}

TEST_CASE("sp_select writes marked tuples in input order") {
  Rng rng = seeded_rng(43);
  for (int t = 0; t < 10; ++t) {
    Relation rel = random_relation("t", {"a", "v"}, 0, 9, 24, rng);
    Predicate p{{{"a", ValueSet::range(0, 3)}}};
    const auto expected_rows = plain_filter(rel, p);
    const i64 cs = static_cast<i64>(expected_rows.size());
    ExecutionContext ctx(43 + t);
    SecureArray out = sp_select(ctx, load(ctx, rel), p, cs);
    CHECK(static_cast<i64>(out.rows()) == cs);
    CHECK(marked_rows(out) == expected_rows);
    // input order: unsorted comparison against the plaintext scan
    std::vector<std::vector<i64>> in_order;
    for (size_t r = 0; r < rel.row_count(); ++r) {
      if (p.conjuncts[0].vals.contains(rel.at(r, 0))) {
        in_order.push_back(rel.row(r));
      }
    }
    for (size_t r = 0; r < out.rows(); ++r) {
      CHECK(ExecutionContext::reconstruct(out.cell(r, 0)) ==
            static_cast<u32>(in_order[r][0]));
      CHECK(ExecutionContext::reconstruct(out.cell(r, 1)) ==
            static_cast<u32>(in_order[r][1]));
    }
  }
}

TEST_CASE("sp_select trace is identical across same-shape inputs") {
  Rng rng = seeded_rng(44);
  Relation r1 = random_relation("t", {"a"}, 0, 9, 30, rng);
  Relation r2 = random_relation("t", {"a"}, 0, 9, 30, rng);
  Predicate p{{{"a", ValueSet::range(0, 4)}}};
  ExecutionContext c1(44), c2(44);
  sp_select(c1, load(c1, r1), p, 12);
  sp_select(c2, load(c2, r2), p, 12);
  CHECK(c1.trace.digest() == c2.trace.digest());
  CHECK(c1.trace.size() == c2.trace.size());
}

TEST_CASE("dc_select loads the merged interval and refines") {
  Rng rng = seeded_rng(45);
  for (int t = 0; t < 20; ++t) {
    Relation rel = random_relation("t", {"a", "j"}, 0, 15, 80, rng);
    Synopsis syn = gen_synopsis({AttrPair{"a", "j"}}, rel, 1.5, 5e-5, 8, rng);
    IndexedStore store = build_indexed_store(rel, syn, "a");
    const i64 lo = static_cast<i64>(rng() % 16);
    Predicate p{{{"a", ValueSet::range(lo, lo + 2)}}};
    const auto interval = lookup(store.index, p.conjuncts[0].vals);
    ExecutionContext ctx(45 + t);
    SecureArray out =
        interval ? dc_select(ctx, store, "", interval->first, interval->second,
                             p, true)
                 : SecureArray{};
    CHECK(marked_rows(out) == plain_filter(rel, p));
  }
}

TEST_CASE("mx bucket bound follows the MF join formula") {
  MxJoinParams params;
  params.join_attr = "k";
  params.bin_edges = {0, 10};
  params.left = {"l.k", 2, {{0, 10}}, false};
  params.right = {"r.k", 3, {{0, 9}}, false};
  // min(10/2, 9/3) * 2 * 3 = 18
  CHECK(mx_bucket_bounds(params) == std::vector<i64>{18});

  params.left.mf_hat = 1;
  params.right.mf_hat = 1;
  // unique keys both sides: min of the slice widths
  CHECK(mx_bucket_bounds(params) == std::vector<i64>{9});

  params.left.intervals = {{0, 2}};
  params.right.mf_hat = 40;
  params.left.mf_hat = 50;
  // clipped by the bucket product
  CHECK(mx_bucket_bounds(params) == std::vector<i64>{18});
}

TEST_CASE("the 18-tuple bucket bound is tight over multisets with those MFs") {
  // brute-force max join size over key multisets: |R0|=10 with mf0 <= 2,
  // |R1|=9 with mf1 <= 3
  i64 best = 0;
  // f0 distributes 10 among values with counts in {1,2}; f1 distributes 9
  // with counts in {1,2,3}. Overlap maximizes sum(f0[v] * f1[v]).
  for (int twos = 0; twos <= 5; ++twos) {      // values with f0 = 2
    const int ones0 = 10 - 2 * twos;
    for (int threes = 0; threes <= 3; ++threes) {
      for (int twos1 = 0; 3 * threes + 2 * twos1 <= 9; ++twos1) {
        const int ones1 = 9 - 3 * threes - 2 * twos1;
        // pair the largest counts together greedily
        std::vector<i64> f0, f1;
        for (int i = 0; i < twos; ++i) f0.push_back(2);
        for (int i = 0; i < ones0; ++i) f0.push_back(1);
        for (int i = 0; i < threes; ++i) f1.push_back(3);
        for (int i = 0; i < twos1; ++i) f1.push_back(2);
        for (int i = 0; i < ones1; ++i) f1.push_back(1);
        i64 sum = 0;
        for (size_t i = 0; i < std::min(f0.size(), f1.size()); ++i) {
          sum += f0[i] * f1[i];
        }
        best = std::max(best, sum);
      }
    }
  }
  CHECK(best == 18);
}

namespace {

struct MxFixture {
  Relation ra, rb;
  Synopsis sa, sb;
  MxJoinParams params;
};

MxFixture make_mx_fixture(Rng& rng, size_t na, size_t nb) {
  MxFixture f;
  f.ra = random_relation("r", {"k", "x"}, 0, 15, na, rng);
  f.rb = random_relation("s", {"k", "y"}, 0, 15, nb, rng);
  f.sa = gen_synopsis({AttrPair{std::nullopt, "k"}, AttrPair{"x", "k"}}, f.ra,
                      1.5, 5e-5, 8, rng);
  f.sb = gen_synopsis({AttrPair{std::nullopt, "k"}, AttrPair{"y", "k"}}, f.rb,
                      1.5, 5e-5, 8, rng);

  const auto ha = bounding_1d(f.sa, "k");
  const auto hb = bounding_1d(f.sb, "k");
  SpecialIndex ia = build_index(*ha, static_cast<i64>(na));
  SpecialIndex ib = build_index(*hb, static_cast<i64>(nb));
  f.params.join_attr = "k";
  f.params.bin_edges = ia.edges;
  f.params.left = {"r.k", *f.sa.entries[0].mf.global, ia.intervals, false};
  f.params.right = {"s.k", *f.sb.entries[0].mf.global, ib.intervals, false};
  f.params.eq_cols = {{"r.k", "s.k"}};
  f.params.cs = mx_bucket_bounds(f.params);
  return f;
}

}  // namespace

TEST_CASE("mx_join is lossless and never misses a joined tuple") {
  Rng rng = seeded_rng(46);
  for (int t = 0; t < 12; ++t) {
    MxFixture f = make_mx_fixture(rng, 30 + rng() % 30, 20 + rng() % 30);
    ExecutionContext ctx(46 + t);
    SecureArray a = load(ctx, f.ra, "r");
    SecureArray b = load(ctx, f.rb, "s");
    MxJoinResult res = mx_join(ctx, a, b, f.params);

    std::vector<std::vector<i64>> expected;
    for (size_t i = 0; i < f.ra.row_count(); ++i) {
      for (size_t j = 0; j < f.rb.row_count(); ++j) {
        if (f.ra.at(i, 0) == f.rb.at(j, 0)) {
          expected.push_back(
              {f.ra.at(i, 0), f.ra.at(i, 1), f.rb.at(j, 0), f.rb.at(j, 1)});
        }
      }
    }
    std::sort(expected.begin(), expected.end());
    CHECK(marked_rows(res.out) == expected);

    // output size is the bucketwise MF bound, never above the full product
    i64 total = 0;
    for (i64 c : res.cs) total += c;
    CHECK(static_cast<i64>(res.out.rows()) == total);
    CHECK(total <=
          static_cast<i64>(f.ra.row_count() * f.rb.row_count()));
    for (size_t i = 0; i < res.cs.size(); ++i) {
      CHECK(res.bucket_marked[i] <= res.cs[i]);
    }
    // annotation propagates the product MF and bucket extents
    CHECK(res.annotation.mf_hat ==
          f.params.left.mf_hat * f.params.right.mf_hat);
    CHECK(res.annotation.intervals.back().second == total);
  }
}

TEST_CASE("mx_join output buckets are exact and deterministic") {
  Rng rng = seeded_rng(47);
  MxFixture f = make_mx_fixture(rng, 40, 35);
  ExecutionContext c1(47), c2(47);
  MxJoinResult r1 =
      mx_join(c1, load(c1, f.ra, "r"), load(c1, f.rb, "s"), f.params);
  MxJoinResult r2 =
      mx_join(c2, load(c2, f.ra, "r"), load(c2, f.rb, "s"), f.params);
  CHECK(marked_rows(r1.out) == marked_rows(r2.out));
  CHECK(c1.trace.digest() == c2.trace.digest());
  // every valid tuple of bucket i carries a key inside bin i
  const Histogram& h = f.sa.entries[1].hist.upper;  // (x, k) pair; axis 1 = k
  (void)h;
  for (size_t i = 0; i < r1.annotation.intervals.size(); ++i) {
    const auto [lo, hi] = r1.annotation.intervals[i];
    for (i64 r = lo; r < hi; ++r) {
      if (!(ExecutionContext::reconstruct(r1.out.ret[static_cast<size_t>(r)]) &
            1u)) {
        continue;
      }
      const i64 k = ExecutionContext::reconstruct(
          r1.out.cell(static_cast<size_t>(r), 0));
      CHECK(k >= f.params.bin_edges[i]);
      CHECK(k < f.params.bin_edges[i + 1]);
    }
  }
}

TEST_CASE("mx_join rejects mismatched bucket configurations") {
  Rng rng = seeded_rng(48);
  MxFixture f = make_mx_fixture(rng, 20, 20);
  f.params.right.intervals.pop_back();
  ExecutionContext ctx(48);
  SecureArray a = load(ctx, f.ra, "r");
  SecureArray b = load(ctx, f.rb, "s");
  CHECK_THROWS_AS(mx_join(ctx, a, b, f.params), InvalidParameter);
  f.params.left.intervals.clear();
  f.params.right.intervals.clear();
  CHECK_THROWS_AS(mx_join(ctx, a, b, f.params), NotApplicable);
}
