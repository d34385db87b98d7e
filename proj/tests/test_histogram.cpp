#include "doctest.h"
#include "helpers.hpp"
#include "synoq/histogram.hpp"

using namespace synoq;
using namespace synoq::testing;

TEST_CASE("value sets") {
  ValueSet v;
  v.ranges = {{5, 9}, {1, 2}, {8, 12}};
  v.normalize();
  CHECK(v.ranges == std::vector<std::pair<i64, i64>>{{1, 2}, {5, 12}});
  CHECK(v.contains(2));
  CHECK(!v.contains(3));
  CHECK(v.intersects(0, 1));
  CHECK(!v.intersects(3, 4));
  CHECK(v.covers(6, 11));
  CHECK(!v.covers(1, 5));
  ValueSet w = ValueSet::range(2, 6);
  const ValueSet x = v.intersect(w);
  CHECK(x.ranges == std::vector<std::pair<i64, i64>>{{2, 2}, {5, 6}});
}

TEST_CASE("hist_gen counts a tiny fixture") {
  Relation rel = make_relation("t", {{"a", {0, 7}}}, {{0}, {0}, {7}});
  Histogram h = hist_gen({"a"}, rel, 8);
  CHECK(h.counts == std::vector<i64>{2, 0, 0, 0, 0, 0, 0, 1});
  CHECK(h.total() == 3);
}

TEST_CASE("hist_gen on an empty relation is all zeros") {
  Relation rel = make_relation("t", {{"a", {0, 7}}}, {});
  Histogram h = hist_gen({"a"}, rel, 8);
  CHECK(h.total() == 0);
  CHECK(h.counts.size() == 8);
}

TEST_CASE("2D histogram cells sum to the 1D marginals") {
  Rng rng = seeded_rng(5);
  Relation rel = random_relation("t", {"a", "b"}, 0, 15, 1000, rng);
  Histogram h2 = hist_gen({"a", "b"}, rel, 4);
  Histogram ha = hist_gen({"a"}, rel, 4);
  Histogram hb = hist_gen({"b"}, rel, 4);
  CHECK(h2.total() == 1000);
  for (size_t i = 0; i < 4; ++i) {
    i64 row = 0, col = 0;
    for (size_t j = 0; j < 4; ++j) {
      row += h2.counts[i * 4 + j];
      col += h2.counts[j * 4 + i];
    }
    CHECK(row == ha.counts[i]);
    CHECK(col == hb.counts[i]);
  }
}

namespace {

BoundingHistogram small_2x2(const std::vector<i64>& upper,
                            const std::vector<i64>& lower) {
  BoundingHistogram bh;
  for (Histogram* h : {&bh.upper, &bh.lower}) {
    h->axes = {"a", "b"};
    h->edges = {{0, 2, 4}, {0, 2, 4}};
  }
  bh.upper.counts = upper;
  bh.lower.counts = lower;
  return bh;
}

}  // namespace

TEST_CASE("marginalize sums rows and columns") {
  BoundingHistogram bh = small_2x2({1, 2, 3, 4}, {0, 1, 2, 3});
  BoundingHistogram a = marginalize(bh, "a");
  CHECK(a.upper.counts == std::vector<i64>{3, 7});
  CHECK(a.lower.counts == std::vector<i64>{1, 5});
  BoundingHistogram b = marginalize(bh, "b");
  CHECK(b.upper.counts == std::vector<i64>{4, 6});
  // total preserved either way
  CHECK(a.upper.total() == bh.upper.total());
  CHECK(b.upper.total() == bh.upper.total());
  CHECK_THROWS_AS(marginalize(bh, "c"), InvalidParameter);
}

TEST_CASE("filtered_histogram selects intersecting filter bins") {
  BoundingHistogram bh = small_2x2({1, 2, 3, 4}, {0, 1, 2, 3});
  SUBCASE("full domain equals the plain marginal") {
    BoundingHistogram f = filtered_histogram(bh, ValueSet::range(0, 3));
    CHECK(f.upper.counts == marginalize(bh, "b").upper.counts);
    CHECK(f.lower.counts == marginalize(bh, "b").lower.counts);
  }
  SUBCASE("no intersecting bin is all zero") {
    BoundingHistogram f = filtered_histogram(bh, ValueSet::range(9, 12));
    CHECK(f.upper.counts == std::vector<i64>{0, 0});
  }
  SUBCASE("single bin") {
    BoundingHistogram f = filtered_histogram(bh, ValueSet::point(1));
    CHECK(f.upper.counts == std::vector<i64>{1, 2});
  }
}

TEST_CASE("filtered upper bounds the plaintext filtered histogram") {
  Rng rng = seeded_rng(6);
  for (int trial = 0; trial < 60; ++trial) {
    Relation rel = random_relation("t", {"f", "j"}, 0, 31, 200, rng);
    Histogram exact = hist_gen({"f", "j"}, rel, 8);
    BoundingHistogram bh;
    bh.upper = exact;
    bh.lower = exact;  // zero-noise hook: bounds are tight
    const i64 lo = static_cast<i64>(rng() % 32);
    const i64 hi = lo + static_cast<i64>(rng() % 8);
    const ValueSet vals = ValueSet::range(lo, hi);
    BoundingHistogram f = filtered_histogram(bh, vals);
    // plaintext filter + recount on j
    Relation filtered = rel;
    filtered.cells.clear();
    for (size_t r = 0; r < rel.row_count(); ++r) {
      if (vals.contains(rel.at(r, 0))) filtered.append_row(rel.row(r));
    }
    Histogram truth = hist_gen({"j"}, filtered, 8);
    for (size_t b = 0; b < 8; ++b) {
      CHECK(f.upper.counts[b] >= truth.counts[b]);
    }
  }
}
