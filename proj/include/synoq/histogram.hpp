#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "synoq/schema.hpp"

namespace synoq {

// Set of attribute values as sorted disjoint closed integer ranges.
struct ValueSet {
  std::vector<std::pair<i64, i64>> ranges;

  static ValueSet point(i64 v) { return ValueSet{{{v, v}}}; }
  static ValueSet range(i64 lo, i64 hi) { return ValueSet{{{lo, hi}}}; }

  bool empty() const { return ranges.empty(); }
  bool contains(i64 v) const;
  // Closed-interval intersection / containment tests.
  bool intersects(i64 lo, i64 hi) const;
  bool covers(i64 lo, i64 hi) const;
  ValueSet intersect(const ValueSet& other) const;
  void normalize();  // sort and merge overlapping or adjacent ranges
};

// Equal-width histogram over one or two integer-encoded attributes.
// Axis k partitions its domain into half-open cells
// [edges[k][i], edges[k][i+1]), with the last edge one past the domain max.
struct Histogram {
  std::vector<std::string> axes;
  std::vector<std::vector<i64>> edges;  // per axis, size bins+1
  std::vector<i64> counts;              // row major, axis 0 major

  size_t dims() const { return axes.size(); }
  size_t bins(size_t axis) const { return edges[axis].size() - 1; }
  size_t cell_count() const;
  i64 total() const;
  // Bin index of value v on the given axis; -1 when outside the domain.
  int bin_of(size_t axis, i64 v) const;
  i64 bin_lo(size_t axis, size_t bin) const { return edges[axis][bin]; }
  i64 bin_hi_incl(size_t axis, size_t bin) const {
    return edges[axis][bin + 1] - 1;
  }
};

// Pair of one-sided noisy histograms sharing bin edges: `upper` cellwise
// overestimates the exact histogram, `lower` underestimates it (lower cells
// may be negative; they are clipped only at use sites).
struct BoundingHistogram {
  Histogram upper;
  Histogram lower;

  size_t dims() const { return upper.dims(); }
};

// Equal-width bin edges for `bins` cells over [lo, hi]; the bin count is
// clamped to the domain width so no cell is empty by construction.
std::vector<i64> equal_width_edges(i64 lo, i64 hi, size_t bins);

// Exact (noise-free) equal-width histogram of the given attributes.
Histogram hist_gen(const std::vector<std::string>& attrs,
                   const Relation& relation, size_t bins_per_axis);

// Marginal sums of a 2D bounding histogram onto the kept axis. Deterministic
// post-processing; no privacy cost.
BoundingHistogram marginalize(const BoundingHistogram& h,
                              const std::string& keep_axis);

// Selective marginal sum over axis-0 bins intersecting `vals`, producing the
// 1D bounding histogram of axis 1 for the pre-filtered relation.
BoundingHistogram filtered_histogram(const BoundingHistogram& h,
                                     const ValueSet& vals);

}  // namespace synoq
