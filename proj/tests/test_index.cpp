#include <map>

#include "doctest.h"
#include "helpers.hpp"
#include "synoq/spe_index.hpp"

using namespace synoq;
using namespace synoq::testing;

namespace {

// Per-value bins over [lo, hi].
BoundingHistogram manual_1d(const std::string& attr, i64 lo, i64 hi,
                            std::vector<i64> upper, std::vector<i64> lower) {
  BoundingHistogram bh;
  std::vector<i64> edges;
  for (i64 v = lo; v <= hi + 1; ++v) edges.push_back(v);
  for (Histogram* h : {&bh.upper, &bh.lower}) {
    h->axes = {attr};
    h->edges = {edges};
  }
  bh.upper.counts = std::move(upper);
  bh.lower.counts = std::move(lower);
  return bh;
}

}  // namespace

TEST_CASE("noisy cumulative curves index value 24 as [198, 267)") {
  // Attribute values 1..25, one bin per value. True counts: 9 for 1..22,
  // then 19, 31, 52 (cumulative 217 below 24 and 248 through 24, total 300).
  std::vector<i64> truth(25, 9);
  truth[22] = 19;
  truth[23] = 31;
  truth[24] = 52;
  std::vector<i64> upper = truth;
  upper[23] += 19;  // positive noise pushes the cumulative curve to 267
  std::vector<i64> lower = truth;
  lower[22] = 0;  // negative noise pulls the cumulative curve to 198

  SpecialIndex idx = build_index(manual_1d("a", 1, 25, upper, lower), 300);
  const auto [lo, hi] = idx.intervals[23];  // bin of value 24
  CHECK(lo == 198);
  CHECK(hi == 267);
  // contains the true range [217, 248)
  CHECK(lo <= 217);
  CHECK(hi >= 248);
  const auto merged = lookup(idx, ValueSet::point(24));
  REQUIRE(merged.has_value());
  CHECK(*merged == std::make_pair(i64{198}, i64{267}));
}

TEST_CASE("zero-noise bounding histograms give exact cumulative ranges") {
  Rng rng = seeded_rng(21);
  Relation rel = random_relation("t", {"a"}, 0, 15, 64, rng);
  Histogram exact = hist_gen({"a"}, rel, 8);
  BoundingHistogram bh{exact, exact};
  SpecialIndex idx = build_index(bh, 64);
  i64 cum = 0;
  for (size_t b = 0; b < 8; ++b) {
    CHECK(idx.intervals[b].first == cum);
    cum += exact.counts[b];
    CHECK(idx.intervals[b].second == cum);
  }
}

TEST_CASE("intervals are monotone and ordered") {
  Rng rng = seeded_rng(22);
  for (int trial = 0; trial < 40; ++trial) {
    Relation rel = random_relation("t", {"a", "j"}, 0, 31, 100, rng);
    Synopsis syn = gen_synopsis({AttrPair{"a", "j"}}, rel, 1.5, 5e-5, 8, rng);
    const auto bh = bounding_1d(syn, "a");
    SpecialIndex idx = build_index(*bh, 100);
    for (size_t b = 0; b < idx.bins(); ++b) {
      CHECK(idx.intervals[b].first <= idx.intervals[b].second);
      if (b) {
        CHECK(idx.intervals[b].first >= idx.intervals[b - 1].first);
        CHECK(idx.intervals[b].second >= idx.intervals[b - 1].second);
      }
      CHECK(idx.intervals[b].second <= 100);
    }
  }
}

TEST_CASE("cover property: every tuple sits inside its bin interval") {
  Rng rng = seeded_rng(23);
  for (int trial = 0; trial < 120; ++trial) {
    const size_t n = 20 + rng() % 150;
    Relation rel = random_relation("t", {"a", "j"}, 0, 31, n, rng);
    Synopsis syn = gen_synopsis({AttrPair{"a", "j"}}, rel, 1.5, 5e-5, 8, rng);
    IndexedStore store = build_indexed_store(rel, syn, "a");
    CHECK(sorted_rows(store.sorted) == sorted_rows(rel));
    for (size_t r = 0; r < store.sorted.row_count(); ++r) {
      const int b = syn.entries[0].hist.upper.bin_of(0, store.sorted.at(r, 0));
      REQUIRE(b >= 0);
      const auto [lo, hi] = store.index.intervals[static_cast<size_t>(b)];
      CHECK(static_cast<i64>(r) >= lo);
      CHECK(static_cast<i64>(r) < hi);
    }
  }
}

TEST_CASE("lookup merges and reports misses") {
  BoundingHistogram bh = manual_1d("a", 0, 3, {2, 3, 4, 5}, {1, 2, 3, 4});
  SpecialIndex idx = build_index(bh, 14);
  const auto all = lookup(idx, ValueSet::range(0, 3));
  REQUIRE(all.has_value());
  CHECK(*all == std::make_pair(i64{0}, i64{14}));
  const auto one = lookup(idx, ValueSet::point(2));
  REQUIRE(one.has_value());
  CHECK(*one == std::make_pair(i64{3}, i64{9}));
  CHECK(!lookup(idx, ValueSet::range(9, 12)).has_value());
}

TEST_CASE("derived intermediate index covers the filtered relation") {
  Rng rng = seeded_rng(24);
  for (int trial = 0; trial < 60; ++trial) {
    Relation rel = random_relation("t", {"f", "j"}, 0, 15, 120, rng);
    Synopsis syn = gen_synopsis({AttrPair{"f", "j"}}, rel, 1.5, 5e-5, 8, rng);
    const i64 lo = static_cast<i64>(rng() % 16);
    const ValueSet vals = ValueSet::range(lo, lo + static_cast<i64>(rng() % 6));
    // plaintext filter, then sort by j
    std::vector<std::vector<i64>> rows;
    for (size_t r = 0; r < rel.row_count(); ++r) {
      if (vals.contains(rel.at(r, 0))) rows.push_back(rel.row(r));
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a[1] < b[1]; });
    const i64 cs =
        card_est(static_cast<i64>(rel.row_count()), {{"f", vals}}, &syn);
    CHECK(cs >= static_cast<i64>(rows.size()));
    SpecialIndex idx = derive_intermediate_index(syn.entries[0].hist, vals, cs);
    const Histogram& jh = syn.entries[0].hist.upper;
    for (size_t r = 0; r < rows.size(); ++r) {
      const int b = jh.bin_of(1, rows[r][1]);
      REQUIRE(b >= 0);
      const auto [ilo, ihi] = idx.intervals[static_cast<size_t>(b)];
      CHECK(static_cast<i64>(r) >= ilo);
      CHECK(static_cast<i64>(r) < ihi);
    }
  }
}

TEST_CASE("unsound bounding curves are rejected") {
  // lower exceeding upper cumulatively must trip the inversion check
  BoundingHistogram bh = manual_1d("a", 0, 2, {0, 0, 9}, {5, 5, 0});
  CHECK_THROWS_AS(build_index(bh, 9), Error);
  BoundingHistogram dim = manual_1d("a", 0, 2, {1, 1, 1}, {0, 0, 0});
  dim.upper.axes = {"a", "b"};
  dim.upper.edges.push_back({0, 1});
  CHECK_THROWS_AS(build_index(dim, 3), InvalidParameter);
}

TEST_CASE("store build requires synopsis coverage") {
  Rng rng = seeded_rng(25);
  Relation rel = random_relation("t", {"a", "j"}, 0, 15, 50, rng);
  Synopsis syn = gen_synopsis({AttrPair{"a", "j"}}, rel, 1.5, 5e-5, 8, rng);
  CHECK_THROWS_AS(build_indexed_store(rel, syn, "missing"), SchemaError);
}
