#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "synoq/oracle.hpp"
#include "synoq/secure.hpp"

namespace synoq::testing {

// Single-table relation with integer-range columns.
inline Relation make_relation(
    const std::string& name,
    const std::vector<std::pair<std::string, std::pair<i64, i64>>>& cols,
    const std::vector<std::vector<i64>>& rows) {
  Relation rel;
  rel.schema.name = name;
  for (const auto& [cname, dom] : cols) {
    AttrDomain d;
    d.lo = dom.first;
    d.hi = dom.second;
    rel.schema.columns.push_back({cname, d});
  }
  for (const auto& r : rows) rel.append_row(r);
  return rel;
}

inline Relation random_relation(const std::string& name,
                                const std::vector<std::string>& cols, i64 lo,
                                i64 hi, size_t rows, Rng& rng) {
  std::vector<std::pair<std::string, std::pair<i64, i64>>> schema;
  for (const std::string& c : cols) schema.push_back({c, {lo, hi}});
  std::uniform_int_distribution<i64> d(lo, hi);
  std::vector<std::vector<i64>> data(rows);
  for (auto& r : data) {
    for (size_t c = 0; c < cols.size(); ++c) r.push_back(d(rng));
  }
  return make_relation(name, schema, data);
}

// Reconstructed rows with ret = 1 (or all rows when not yet validated).
inline std::vector<std::vector<i64>> marked_rows(const SecureArray& a) {
  std::vector<std::vector<i64>> out;
  for (size_t r = 0; r < a.rows(); ++r) {
    if (a.validated && !(ExecutionContext::reconstruct(a.ret[r]) & 1u)) {
      continue;
    }
    std::vector<i64> row;
    for (size_t c = 0; c < a.width(); ++c) {
      row.push_back(ExecutionContext::reconstruct(a.cell(r, c)));
    }
    out.push_back(std::move(row));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::vector<i64>> sorted_rows(const Relation& rel) {
  std::vector<std::vector<i64>> out;
  for (size_t r = 0; r < rel.row_count(); ++r) out.push_back(rel.row(r));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace synoq::testing
