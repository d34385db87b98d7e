#include "synoq/spe_index.hpp"

#include <algorithm>
#include <numeric>

namespace synoq {

SpecialIndex build_index(const BoundingHistogram& hist, i64 total_len) {
  if (hist.dims() != 1) {
    throw InvalidParameter("build_index expects a 1D bounding histogram");
  }
  SpecialIndex idx;
  idx.attr = hist.upper.axes[0];
  idx.edges = hist.upper.edges[0];
  idx.total_len = total_len;
  const size_t m = hist.upper.bins(0);
  i64 upper_cum = 0;
  i64 lower_cum = 0;
  for (size_t i = 0; i < m; ++i) {
    const i64 lo = lower_cum;  // sum over bins before i
    upper_cum += hist.upper.counts[i];
    const i64 hi = std::min(total_len, upper_cum);
    if (lo > hi) {
      // Possible only when the lower histogram is not a true underestimate.
      throw Error("index interval inverted: bounding histogram unsound");
    }
    idx.intervals.emplace_back(lo, hi);
    lower_cum += std::max<i64>(0, hist.lower.counts[i]);
  }
  return idx;
}

std::optional<std::pair<i64, i64>> lookup(const SpecialIndex& index,
                                          const ValueSet& vals) {
  i64 a = 0;
  i64 b = 0;
  bool any = false;
  for (size_t i = 0; i < index.bins(); ++i) {
    const i64 bin_lo = index.edges[i];
    const i64 bin_hi = index.edges[i + 1] - 1;
    if (!vals.intersects(bin_lo, bin_hi)) continue;
    if (!any) {
      a = index.intervals[i].first;
      b = index.intervals[i].second;
      any = true;
    } else {
      a = std::min(a, index.intervals[i].first);
      b = std::max(b, index.intervals[i].second);
    }
  }
  if (!any) return std::nullopt;
  return std::make_pair(a, b);
}

IndexedStore build_indexed_store(const Relation& relation,
                                 const Synopsis& synopsis,
                                 const std::string& hottest_attr) {
  const auto hist = bounding_1d(synopsis, hottest_attr);
  if (!hist) {
    throw InvalidParameter("no synopsis coverage for attribute '" +
                           hottest_attr + "'");
  }
  IndexedStore store;
  store.relation = relation.schema.name;
  store.attr = hottest_attr;
  store.sorted = relation;

  const int col = relation.schema.column_index(hottest_attr);
  const size_t w = relation.col_count();
  std::vector<size_t> order(relation.row_count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return relation.at(a, col) < relation.at(b, col);
  });
  for (size_t r = 0; r < order.size(); ++r) {
    for (size_t c = 0; c < w; ++c) {
      store.sorted.at(r, c) = relation.at(order[r], c);
    }
  }
  store.index =
      build_index(*hist, static_cast<i64>(relation.row_count()));
  return store;
}

SpecialIndex derive_intermediate_index(const BoundingHistogram& pair_hist,
                                       const ValueSet& vals, i64 total_len) {
  return build_index(filtered_histogram(pair_hist, vals), total_len);
}

SecureArray idx_acc(ExecutionContext& ctx, const IndexedStore& store,
                    size_t a, size_t b, const std::string& alias) {
  return idx_acc(ctx, store.sorted, a, b, alias);
}

}  // namespace synoq
