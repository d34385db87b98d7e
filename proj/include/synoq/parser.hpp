#pragma once

#include <string>
#include <vector>

#include "synoq/query.hpp"

namespace synoq {

// Minimal SPJ-plus-aggregation grammar:
//   SELECT <agg-list | *> FROM <tables> WHERE <equi-joins AND point/range
//   predicates> [GROUP BY col] [ORDER BY agg]
// identifiers may carry schema prefixes (schema.table.attr); string literals
// are dictionary-encoded against the database schema at parse time.
LogicalQuery parse_query(const std::string& text, const Database& db);

// Canonical text form; parse(unparse(q)) is equivalent to q.
std::string unparse(const LogicalQuery& q, const Database& db);

// Splits a workload file on top-level semicolons (skipping `--` comments).
std::vector<std::string> split_statements(const std::string& text);

struct UnsupportedFeature : Error {
  using Error::Error;
};

}  // namespace synoq
