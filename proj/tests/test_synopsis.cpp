#include <map>

#include "doctest.h"
#include "helpers.hpp"
#include "synoq/synopsis.hpp"

using namespace synoq;
using namespace synoq::testing;

namespace {

i64 true_max_frequency(const Relation& rel, int col,
                       const std::vector<size_t>& rows) {
  std::map<i64, i64> counts;
  i64 mx = 0;
  for (size_t r : rows) {
    mx = std::max(mx, ++counts[rel.at(r, static_cast<size_t>(col))]);
  }
  return mx;
}

}  // namespace

TEST_CASE("unique-valued join keys short-circuit MF entries to 1") {
  Relation rel = make_relation("t", {{"f", {0, 7}}, {"j", {0, 99}}},
                               {{0, 1}, {1, 2}, {2, 3}, {7, 42}});
  rel.schema.columns[1].domain.unique_valued = true;
  Rng rng = seeded_rng(1);
  Synopsis syn =
      gen_synopsis({AttrPair{"f", "j"}, AttrPair{std::nullopt, "j"}}, rel, 1.5,
                   5e-5, 8, rng);
  for (i64 v : syn.entries[0].mf.per_bin) CHECK(v == 1);
  CHECK(syn.entries[1].mf.global == 1);
}

TEST_CASE("bounding histograms bracket the exact histogram") {
  Rng rng = seeded_rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    Relation rel = random_relation("t", {"f", "j"}, 0, 31, 150, rng);
    Synopsis syn = gen_synopsis({AttrPair{"f", "j"}}, rel, 1.5, 5e-5, 8, rng);
    const Histogram exact = hist_gen({"f", "j"}, rel, 8);
    const SynopsisEntry& e = syn.entries[0];
    for (size_t c = 0; c < exact.counts.size(); ++c) {
      CHECK(e.hist.upper.counts[c] >= exact.counts[c]);
      CHECK(e.hist.lower.counts[c] <= exact.counts[c]);
    }
  }
}

TEST_CASE("per-bin MF entries dominate true partition max frequencies") {
  Rng rng = seeded_rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Relation rel = random_relation("t", {"f", "j"}, 0, 15, 120, rng);
    Synopsis syn = gen_synopsis({AttrPair{"f", "j"}}, rel, 1.5, 5e-5, 8, rng);
    const SynopsisEntry& e = syn.entries[0];
    const Histogram& ft = e.hist.upper;
    for (size_t b = 0; b < e.mf.per_bin.size(); ++b) {
      std::vector<size_t> part;
      for (size_t r = 0; r < rel.row_count(); ++r) {
        if (ft.bin_of(0, rel.at(r, 0)) == static_cast<int>(b)) {
          part.push_back(r);
        }
      }
      CHECK(e.mf.per_bin[b] >= true_max_frequency(rel, 1, part));
    }
  }
}

TEST_CASE("filtered_mf follows the capped marginal-sum rule") {
  SynopsisEntry e;
  e.pair = {std::string("f"), std::string("j")};
  for (Histogram* h : {&e.hist.upper, &e.hist.lower}) {
    h->axes = {"f", "j"};
    h->edges = {{0, 1, 2, 3}, {0, 10}};
    h->counts = {0, 0, 0};
  }
  e.mf.join_attr = "j";
  e.mf.per_bin = {2, 3, 4};
  SUBCASE("values hitting two bins, capped by the global MF") {
    e.mf.global = 4;
    CHECK(filtered_mf(e, ValueSet::range(0, 1)) == 4);
  }
  SUBCASE("single bin, no global") {
    CHECK(filtered_mf(e, ValueSet::point(2)) == 4);
    CHECK(filtered_mf(e, ValueSet::point(0)) == 2);
  }
  SUBCASE("standalone global supplied by the caller") {
    CHECK(filtered_mf(e, ValueSet::range(0, 2), 6) == 6);
  }
  SUBCASE("missing per-bin table is an error") {
    e.mf.per_bin.clear();
    CHECK_THROWS_AS(filtered_mf(e, ValueSet::point(0)), NotApplicable);
  }
}

TEST_CASE("filtered_mf dominates the true filtered max frequency") {
  Rng rng = seeded_rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    Relation rel = random_relation("t", {"f", "j"}, 0, 15, 120, rng);
    Synopsis syn = gen_synopsis({AttrPair{"f", "j"}}, rel, 1.5, 5e-5, 8, rng);
    const i64 lo = static_cast<i64>(rng() % 16);
    const i64 hi = lo + static_cast<i64>(rng() % 6);
    const ValueSet vals = ValueSet::range(lo, hi);
    std::vector<size_t> rows;
    for (size_t r = 0; r < rel.row_count(); ++r) {
      if (vals.contains(rel.at(r, 0))) rows.push_back(r);
    }
    CHECK(filtered_mf(syn.entries[0], vals) >=
          true_max_frequency(rel, 1, rows));
  }
}

TEST_CASE("card_est falls back, zeroes out, and never underestimates") {
  Rng rng = seeded_rng(5);
  Relation rel = random_relation("t", {"a", "b"}, 0, 31, 200, rng);
  Synopsis syn = gen_synopsis({AttrPair{"a", std::nullopt}}, rel, 1.5, 5e-5,
                              8, rng);
  const i64 n = static_cast<i64>(rel.row_count());

  SUBCASE("no synopsis coverage returns |R|") {
    CHECK(card_est(n, {{"b", ValueSet::point(3)}}, &syn) == n);
    CHECK(card_est(n, {{"a", ValueSet::point(3)}}, nullptr) == n);
  }
  SUBCASE("no intersecting bin returns 0") {
    CHECK(card_est(n, {{"a", ValueSet::range(100, 200)}}, &syn) == 0);
  }
  SUBCASE("conjunctions take the per-attribute minimum") {
    const i64 a_only = card_est(n, {{"a", ValueSet::range(0, 3)}}, &syn);
    const i64 both = card_est(
        n, {{"a", ValueSet::range(0, 3)}, {"b", ValueSet::point(1)}}, &syn);
    CHECK(both == std::min(a_only, n));
  }
  SUBCASE("randomized overestimation") {
    for (int t = 0; t < 200; ++t) {
      const i64 lo = static_cast<i64>(rng() % 32);
      const i64 hi = lo + static_cast<i64>(rng() % 10);
      const ValueSet vals = ValueSet::range(lo, hi);
      i64 truth = 0;
      for (size_t r = 0; r < rel.row_count(); ++r) {
        if (vals.contains(rel.at(r, 0))) ++truth;
      }
      CHECK(card_est(n, {{"a", vals}}, &syn) >= truth);
    }
  }
}

TEST_CASE("synopsis transformations are deterministic") {
  Rng rng = seeded_rng(6);
  Relation rel = random_relation("t", {"f", "j"}, 0, 15, 100, rng);
  Synopsis syn = gen_synopsis({AttrPair{"f", "j"}}, rel, 1.5, 5e-5, 8, rng);
  const auto a = marginalize(syn.entries[0].hist, "j");
  const auto b = marginalize(syn.entries[0].hist, "j");
  CHECK(a.upper.counts == b.upper.counts);
  CHECK(a.lower.counts == b.lower.counts);
  const ValueSet vals = ValueSet::range(2, 9);
  CHECK(filtered_histogram(syn.entries[0].hist, vals).upper.counts ==
        filtered_histogram(syn.entries[0].hist, vals).upper.counts);
  CHECK(filtered_mf(syn.entries[0], vals) ==
        filtered_mf(syn.entries[0], vals));
}
