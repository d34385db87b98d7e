#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "synoq/synopsis.hpp"

namespace synoq {

// Conjunction of per-attribute value-set conditions. Attribute names are
// unqualified inside a relation-scoped predicate and alias-qualified once a
// predicate targets a secure array.
struct Predicate {
  std::vector<AttrCondition> conjuncts;

  bool empty() const { return conjuncts.empty(); }
  const AttrCondition* on(const std::string& attr) const;
  // H-2 fusion: intersect value sets of repeated attributes.
  Predicate fused() const;
};

struct TableRef {
  std::string table;
  std::string alias;
};

struct JoinEdge {
  std::string left_alias, left_attr;
  std::string right_alias, right_attr;
};

enum class AggKind { None, Count, CountDistinct, Sum, Min, Max };

struct Aggregation {
  AggKind kind = AggKind::None;
  std::string attr;                     // qualified; empty for count(*)
  std::optional<std::string> group_by;  // qualified grouping column
  bool order_by_agg = false;            // ORDER BY on the aggregate value
};

// SPJ query followed by a single statistical aggregation.
struct LogicalQuery {
  std::vector<TableRef> relations;
  std::map<std::string, Predicate> filters;  // keyed by alias
  std::vector<JoinEdge> joins;
  Aggregation agg;
  bool select_star = false;
  std::vector<std::string> select_columns;  // qualified, for star/group output

  const TableRef* find_alias(const std::string& alias) const;
  std::vector<JoinEdge> edges_between(const std::string& alias,
                                      const std::vector<std::string>& placed)
      const;
};

}  // namespace synoq
