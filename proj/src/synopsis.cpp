#include "synoq/synopsis.hpp"

#include <algorithm>
#include <map>

namespace synoq {

std::vector<std::string> AttrPair::attrs() const {
  std::vector<std::string> out;
  if (filter_attr) out.push_back(*filter_attr);
  if (join_attr) out.push_back(*join_attr);
  return out;
}

const SynopsisEntry* Synopsis::find_pair(
    const std::optional<std::string>& ft,
    const std::optional<std::string>& j) const {
  for (const SynopsisEntry& e : entries) {
    if (e.pair.filter_attr == ft && e.pair.join_attr == j) return &e;
  }
  return nullptr;
}

const SynopsisEntry* Synopsis::covering(const std::string& attr) const {
  const SynopsisEntry* two_d = nullptr;
  for (const SynopsisEntry& e : entries) {
    const auto as = e.pair.attrs();
    if (std::find(as.begin(), as.end(), attr) == as.end()) continue;
    if (e.hist.dims() == 1) return &e;
    if (!two_d) two_d = &e;
  }
  return two_d;
}

namespace {

// Max group count of `join_col` among the given rows (0 for an empty set).
std::vector<i64> group_counts(const Relation& rel, int join_col,
                              const std::vector<size_t>& rows) {
  std::map<i64, i64> groups;
  for (size_t r : rows) ++groups[rel.at(r, join_col)];
  std::vector<i64> out;
  out.reserve(groups.size());
  for (const auto& [v, c] : groups) out.push_back(c);
  return out;
}

MFTable gen_mf_table(const AttrPair& pair, const Relation& rel,
                     const Histogram& exact, double epsilon, Rng& rng) {
  MFTable mf;
  if (!pair.join_attr) return mf;
  mf.join_attr = *pair.join_attr;
  const AttrDomain& jdom = rel.schema.domain(*pair.join_attr);
  const int jcol = rel.schema.column_index(*pair.join_attr);

  if (pair.filter_attr) {
    const size_t m = exact.bins(0);
    mf.per_bin.assign(m, 0);
    if (jdom.unique_valued) {
      std::fill(mf.per_bin.begin(), mf.per_bin.end(), 1);
      return mf;
    }
    const int fcol = rel.schema.column_index(*pair.filter_attr);
    std::vector<std::vector<size_t>> partition(m);
    for (size_t r = 0; r < rel.row_count(); ++r) {
      const int b = exact.bin_of(0, rel.at(r, fcol));
      if (b >= 0) partition[static_cast<size_t>(b)].push_back(r);
    }
    for (size_t b = 0; b < m; ++b) {
      if (partition[b].empty()) continue;  // keep 0 for empty partitions
      mf.per_bin[b] =
          report_noisy_max(group_counts(rel, jcol, partition[b]), epsilon, rng);
    }
    return mf;
  }

  if (jdom.unique_valued) {
    mf.global = 1;
    return mf;
  }
  std::vector<size_t> all(rel.row_count());
  for (size_t r = 0; r < all.size(); ++r) all[r] = r;
  mf.global = all.empty()
                  ? i64{0}
                  : report_noisy_max(group_counts(rel, jcol, all), epsilon, rng);
  return mf;
}

}  // namespace

Synopsis gen_synopsis(const std::vector<AttrPair>& pairs,
                      const Relation& relation, double epsilon, double delta,
                      size_t bins_per_axis, Rng& rng) {
  if (pairs.empty()) {
    throw InvalidParameter("gen_synopsis needs at least one pair");
  }
  const OneSidedLaplace noise(epsilon, delta);
  Synopsis syn;
  syn.relation = relation.schema.name;
  syn.epsilon = epsilon;
  syn.delta = delta;
  for (const AttrPair& pair : pairs) {
    if (!pair.valid()) throw InvalidParameter("attribute pair with no sides");
    SynopsisEntry e;
    e.pair = pair;
    const Histogram exact = hist_gen(pair.attrs(), relation, bins_per_axis);
    e.hist.upper = exact;
    e.hist.lower = exact;
    for (i64& c : e.hist.upper.counts) {
      c += noise.sample(NoiseSign::Positive, rng);
    }
    for (i64& c : e.hist.lower.counts) {
      c += noise.sample(NoiseSign::Negative, rng);
    }
    e.mf = gen_mf_table(pair, relation, exact, epsilon, rng);
    syn.entries.push_back(std::move(e));
  }
  return syn;
}

i64 filtered_mf(const SynopsisEntry& entry, const ValueSet& vals,
                std::optional<i64> standalone_global) {
  if (entry.mf.per_bin.empty()) {
    throw NotApplicable("no per-bin MF table for pair");
  }
  const Histogram& ft = entry.hist.upper;  // filter axis is axis 0
  i64 sum = 0;
  for (size_t b = 0; b < entry.mf.per_bin.size(); ++b) {
    if (vals.intersects(ft.bin_lo(0, b), ft.bin_hi_incl(0, b))) {
      sum += entry.mf.per_bin[b];
    }
  }
  i64 best = sum;
  if (entry.mf.global) best = std::min(best, *entry.mf.global);
  if (standalone_global) best = std::min(best, *standalone_global);
  return best;
}

std::optional<BoundingHistogram> bounding_1d(const Synopsis& synopsis,
                                             const std::string& attr) {
  const SynopsisEntry* e = synopsis.covering(attr);
  if (!e) return std::nullopt;
  if (e->hist.dims() == 1) return e->hist;
  return marginalize(e->hist, attr);
}

i64 card_est(i64 relation_size, const std::vector<AttrCondition>& conjuncts,
             const Synopsis* synopsis) {
  i64 best = relation_size;
  if (!synopsis) return best;
  for (const AttrCondition& c : conjuncts) {
    const auto bh = bounding_1d(*synopsis, c.attr);
    if (!bh) continue;
    const Histogram& upper = bh->upper;
    i64 mass = 0;
    for (size_t b = 0; b < upper.bins(0); ++b) {
      if (c.vals.intersects(upper.bin_lo(0, b), upper.bin_hi_incl(0, b))) {
        mass += upper.counts[b];
      }
    }
    mass = std::clamp<i64>(mass, 0, relation_size);
    best = std::min(best, mass);
  }
  return best;
}

}  // namespace synoq
