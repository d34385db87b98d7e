#include "synoq/query.hpp"

#include <algorithm>

namespace synoq {

const AttrCondition* Predicate::on(const std::string& attr) const {
  for (const AttrCondition& c : conjuncts) {
    if (c.attr == attr) return &c;
  }
  return nullptr;
}

Predicate Predicate::fused() const {
  Predicate out;
  for (const AttrCondition& c : conjuncts) {
    bool merged = false;
    for (AttrCondition& o : out.conjuncts) {
      if (o.attr == c.attr) {
        o.vals = o.vals.intersect(c.vals);
        merged = true;
        break;
      }
    }
    if (!merged) {
      AttrCondition copy = c;
      copy.vals.normalize();
      out.conjuncts.push_back(copy);
    }
  }
  return out;
}

const TableRef* LogicalQuery::find_alias(const std::string& alias) const {
  for (const TableRef& t : relations) {
    if (t.alias == alias) return &t;
  }
  return nullptr;
}

std::vector<JoinEdge> LogicalQuery::edges_between(
    const std::string& alias, const std::vector<std::string>& placed) const {
  std::vector<JoinEdge> out;
  for (const JoinEdge& e : joins) {
    const bool left_placed =
        std::find(placed.begin(), placed.end(), e.left_alias) != placed.end();
    const bool right_placed =
        std::find(placed.begin(), placed.end(), e.right_alias) != placed.end();
    if (left_placed && e.right_alias == alias) {
      out.push_back(e);
    } else if (right_placed && e.left_alias == alias) {
      // orient so the left endpoint is the already-placed side
      out.push_back({e.right_alias, e.right_attr, e.left_alias, e.left_attr});
    }
  }
  return out;
}

}  // namespace synoq
