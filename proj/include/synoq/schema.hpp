#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "synoq/common.hpp"

namespace synoq {

enum class AttrKind { IntegerRange, Categorical };

// Public metadata for one attribute. Categorical attributes are
// integer-encoded through `dict` (code i <-> dict[i]); the dictionary is
// public because schemas are public.
struct AttrDomain {
  AttrKind kind = AttrKind::IntegerRange;
  i64 lo = 0;
  i64 hi = 0;
  bool unique_valued = false;
  std::vector<std::string> dict;  // only for Categorical

  i64 width() const { return hi - lo + 1; }
  bool contains(i64 v) const { return v >= lo && v <= hi; }
};

struct Column {
  std::string name;
  AttrDomain domain;
};

struct TableSchema {
  std::string name;
  std::vector<Column> columns;

  int column_index(const std::string& attr) const;
  bool has_column(const std::string& attr) const;
  const AttrDomain& domain(const std::string& attr) const;
  // Maps a string literal to its integer code for categorical attributes.
  i64 encode_value(const std::string& attr, const std::string& literal) const;
};

// Plaintext relational table with integer-encoded cells, stored row major.
struct Relation {
  TableSchema schema;
  std::vector<i64> cells;

  size_t row_count() const {
    return schema.columns.empty() ? 0 : cells.size() / schema.columns.size();
  }
  size_t col_count() const { return schema.columns.size(); }
  i64 at(size_t row, size_t col) const {
    return cells[row * schema.columns.size() + col];
  }
  i64& at(size_t row, size_t col) {
    return cells[row * schema.columns.size() + col];
  }
  std::vector<i64> row(size_t r) const;
  void append_row(const std::vector<i64>& values);
  // Domain check for every cell; throws SchemaError on violation.
  void validate() const;
};

struct Database {
  std::map<std::string, Relation> tables;

  const Relation& table(const std::string& name) const;
  bool has_table(const std::string& name) const;
};

// CSV with a header row plus a schema sidecar (schema.json) describing
// domains, dictionaries and unique-value flags for every table in the
// directory.
void save_database(const Database& db, const std::string& dir);
Database load_database(const std::string& dir);

}  // namespace synoq
