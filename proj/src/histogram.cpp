#include "synoq/histogram.hpp"

#include <algorithm>
#include <numeric>

namespace synoq {

bool ValueSet::contains(i64 v) const {
  for (const auto& [lo, hi] : ranges) {
    if (v >= lo && v <= hi) return true;
  }
  return false;
}

bool ValueSet::intersects(i64 lo, i64 hi) const {
  for (const auto& [a, b] : ranges) {
    if (a <= hi && lo <= b) return true;
  }
  return false;
}

bool ValueSet::covers(i64 lo, i64 hi) const {
  // Ranges are normalized, so a covering range must be a single one.
  for (const auto& [a, b] : ranges) {
    if (a <= lo && hi <= b) return true;
  }
  return false;
}

ValueSet ValueSet::intersect(const ValueSet& other) const {
  ValueSet out;
  for (const auto& [a, b] : ranges) {
    for (const auto& [c, d] : other.ranges) {
      const i64 lo = std::max(a, c);
      const i64 hi = std::min(b, d);
      if (lo <= hi) out.ranges.emplace_back(lo, hi);
    }
  }
  out.normalize();
  return out;
}

void ValueSet::normalize() {
  std::sort(ranges.begin(), ranges.end());
  std::vector<std::pair<i64, i64>> merged;
  for (const auto& r : ranges) {
    if (!merged.empty() && r.first <= merged.back().second + 1) {
      merged.back().second = std::max(merged.back().second, r.second);
    } else {
      merged.push_back(r);
    }
  }
  ranges = std::move(merged);
}

size_t Histogram::cell_count() const {
  size_t n = 1;
  for (size_t a = 0; a < dims(); ++a) n *= bins(a);
  return n;
}

i64 Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), i64{0});
}

int Histogram::bin_of(size_t axis, i64 v) const {
  const std::vector<i64>& e = edges[axis];
  if (v < e.front() || v >= e.back()) return -1;
  auto it = std::upper_bound(e.begin(), e.end(), v);
  return static_cast<int>(it - e.begin()) - 1;
}

std::vector<i64> equal_width_edges(i64 lo, i64 hi, size_t bins) {
  if (hi < lo) throw SchemaError("attribute domain is unbounded or empty");
  const i64 width = hi - lo + 1;
  const i64 b = std::min<i64>(static_cast<i64>(bins), width);
  if (b < 1) throw InvalidParameter("bin count must be positive");
  std::vector<i64> edges(static_cast<size_t>(b) + 1);
  for (i64 k = 0; k <= b; ++k) {
    edges[static_cast<size_t>(k)] = lo + k * width / b;
  }
  return edges;
}

Histogram hist_gen(const std::vector<std::string>& attrs,
                   const Relation& relation, size_t bins_per_axis) {
  if (attrs.empty() || attrs.size() > 2) {
    throw InvalidParameter("hist_gen supports one or two attributes");
  }
  Histogram h;
  h.axes = attrs;
  std::vector<int> cols;
  for (const std::string& a : attrs) {
    const AttrDomain& d = relation.schema.domain(a);
    h.edges.push_back(equal_width_edges(d.lo, d.hi, bins_per_axis));
    cols.push_back(relation.schema.column_index(a));
  }
  h.counts.assign(h.cell_count(), 0);
  const size_t b1 = h.dims() == 2 ? h.bins(1) : 1;
  for (size_t r = 0; r < relation.row_count(); ++r) {
    size_t cell = 0;
    bool ok = true;
    for (size_t a = 0; a < h.dims(); ++a) {
      const int bi = h.bin_of(a, relation.at(r, cols[a]));
      if (bi < 0) {
        ok = false;
        break;
      }
      cell = a == 0 ? static_cast<size_t>(bi) : cell * b1 + bi;
    }
    if (ok) ++h.counts[cell];
  }
  return h;
}

BoundingHistogram marginalize(const BoundingHistogram& h,
                              const std::string& keep_axis) {
  if (h.dims() != 2) throw InvalidParameter("marginalize expects a 2D pair");
  size_t keep;
  if (h.upper.axes[0] == keep_axis) {
    keep = 0;
  } else if (h.upper.axes[1] == keep_axis) {
    keep = 1;
  } else {
    throw InvalidParameter("axis '" + keep_axis + "' not in histogram");
  }
  const size_t b0 = h.upper.bins(0);
  const size_t b1 = h.upper.bins(1);
  BoundingHistogram out;
  for (Histogram* dst : {&out.upper, &out.lower}) {
    dst->axes = {keep_axis};
    dst->edges = {h.upper.edges[keep]};
    dst->counts.assign(keep == 0 ? b0 : b1, 0);
  }
  for (size_t i = 0; i < b0; ++i) {
    for (size_t j = 0; j < b1; ++j) {
      const size_t k = keep == 0 ? i : j;
      out.upper.counts[k] += h.upper.counts[i * b1 + j];
      out.lower.counts[k] += h.lower.counts[i * b1 + j];
    }
  }
  return out;
}

BoundingHistogram filtered_histogram(const BoundingHistogram& h,
                                     const ValueSet& vals) {
  if (h.dims() != 2) {
    throw InvalidParameter("filtered_histogram expects a 2D pair");
  }
  const size_t b0 = h.upper.bins(0);
  const size_t b1 = h.upper.bins(1);
  BoundingHistogram out;
  for (Histogram* dst : {&out.upper, &out.lower}) {
    dst->axes = {h.upper.axes[1]};
    dst->edges = {h.upper.edges[1]};
    dst->counts.assign(b1, 0);
  }
  for (size_t i = 0; i < b0; ++i) {
    if (!vals.intersects(h.upper.bin_lo(0, i), h.upper.bin_hi_incl(0, i))) {
      continue;
    }
    for (size_t j = 0; j < b1; ++j) {
      out.upper.counts[j] += h.upper.counts[i * b1 + j];
      out.lower.counts[j] += h.lower.counts[i * b1 + j];
    }
  }
  return out;
}

}  // namespace synoq
