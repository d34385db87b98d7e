#include "synoq/schema.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace synoq {

using nlohmann::json;

int TableSchema::column_index(const std::string& attr) const {
  for (size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == attr) return static_cast<int>(i);
  }
  throw SchemaError("unknown attribute '" + attr + "' in table '" + name + "'");
}

bool TableSchema::has_column(const std::string& attr) const {
  return std::any_of(columns.begin(), columns.end(),
                     [&](const Column& c) { return c.name == attr; });
}

const AttrDomain& TableSchema::domain(const std::string& attr) const {
  return columns[column_index(attr)].domain;
}

i64 TableSchema::encode_value(const std::string& attr,
                              const std::string& literal) const {
  const AttrDomain& d = domain(attr);
  if (d.kind != AttrKind::Categorical) {
    throw SchemaError("attribute '" + attr + "' is not categorical");
  }
  for (size_t i = 0; i < d.dict.size(); ++i) {
    if (d.dict[i] == literal) return static_cast<i64>(i);
  }
  throw SchemaError("value '" + literal + "' not in dictionary of '" + attr +
                    "'");
}

std::vector<i64> Relation::row(size_t r) const {
  const size_t w = schema.columns.size();
  return std::vector<i64>(cells.begin() + r * w, cells.begin() + (r + 1) * w);
}

void Relation::append_row(const std::vector<i64>& values) {
  if (values.size() != schema.columns.size()) {
    throw SchemaError("row arity mismatch for table '" + schema.name + "'");
  }
  cells.insert(cells.end(), values.begin(), values.end());
}

void Relation::validate() const {
  const size_t w = schema.columns.size();
  for (size_t r = 0; r < row_count(); ++r) {
    for (size_t c = 0; c < w; ++c) {
      if (!schema.columns[c].domain.contains(at(r, c))) {
        throw SchemaError("value out of domain for " + schema.name + "." +
                          schema.columns[c].name);
      }
    }
  }
}

const Relation& Database::table(const std::string& name) const {
  auto it = tables.find(name);
  if (it == tables.end()) throw SchemaError("unknown table '" + name + "'");
  return it->second;
}

bool Database::has_table(const std::string& name) const {
  return tables.count(name) > 0;
}

namespace {

json domain_to_json(const AttrDomain& d) {
  json j;
  j["kind"] = d.kind == AttrKind::Categorical ? "categorical" : "int";
  j["lo"] = d.lo;
  j["hi"] = d.hi;
  j["unique"] = d.unique_valued;
  if (d.kind == AttrKind::Categorical) j["dict"] = d.dict;
  return j;
}

AttrDomain domain_from_json(const json& j) {
  AttrDomain d;
  d.kind = j.at("kind") == "categorical" ? AttrKind::Categorical
                                         : AttrKind::IntegerRange;
  d.lo = j.at("lo").get<i64>();
  d.hi = j.at("hi").get<i64>();
  d.unique_valued = j.at("unique").get<bool>();
  if (d.kind == AttrKind::Categorical) {
    d.dict = j.at("dict").get<std::vector<std::string>>();
  }
  return d;
}

std::string cell_to_csv(const AttrDomain& d, i64 v) {
  if (d.kind == AttrKind::Categorical) return d.dict.at(static_cast<size_t>(v));
  return std::to_string(v);
}

i64 cell_from_csv(const AttrDomain& d, const std::string& field,
                  const std::string& attr) {
  if (d.kind == AttrKind::Categorical) {
    for (size_t i = 0; i < d.dict.size(); ++i) {
      if (d.dict[i] == field) return static_cast<i64>(i);
    }
    throw SchemaError("CSV value '" + field + "' not in dictionary of '" +
                      attr + "'");
  }
  return std::stoll(field);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void save_database(const Database& db, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  json schema_doc;
  for (const auto& [name, rel] : db.tables) {
    json cols = json::array();
    for (const Column& c : rel.schema.columns) {
      json jc = domain_to_json(c.domain);
      jc["name"] = c.name;
      cols.push_back(jc);
    }
    schema_doc["tables"][name]["columns"] = cols;

    std::ofstream csv(fs::path(dir) / (name + ".csv"));
    for (size_t c = 0; c < rel.schema.columns.size(); ++c) {
      csv << (c ? "," : "") << rel.schema.columns[c].name;
    }
    csv << "\n";
    for (size_t r = 0; r < rel.row_count(); ++r) {
      for (size_t c = 0; c < rel.schema.columns.size(); ++c) {
        csv << (c ? "," : "")
            << cell_to_csv(rel.schema.columns[c].domain, rel.at(r, c));
      }
      csv << "\n";
    }
  }
  std::ofstream out(fs::path(dir) / "schema.json");
  out << schema_doc.dump(2) << "\n";
}

Database load_database(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream in(fs::path(dir) / "schema.json");
  if (!in) throw SchemaError("cannot open " + dir + "/schema.json");
  json schema_doc = json::parse(in);

  Database db;
  for (const auto& [name, tj] : schema_doc.at("tables").items()) {
    Relation rel;
    rel.schema.name = name;
    for (const json& jc : tj.at("columns")) {
      Column c;
      c.name = jc.at("name").get<std::string>();
      c.domain = domain_from_json(jc);
      rel.schema.columns.push_back(c);
    }
    std::ifstream csv(fs::path(dir) / (name + ".csv"));
    if (!csv) throw SchemaError("cannot open CSV for table '" + name + "'");
    std::string line;
    std::getline(csv, line);  // header
    std::vector<std::string> header = split_csv_line(line);
    if (header.size() != rel.schema.columns.size()) {
      throw SchemaError("CSV header mismatch for table '" + name + "'");
    }
    while (std::getline(csv, line)) {
      if (line.empty()) continue;
      std::vector<std::string> fields = split_csv_line(line);
      std::vector<i64> row(fields.size());
      for (size_t c = 0; c < fields.size(); ++c) {
        row[c] = cell_from_csv(rel.schema.columns[c].domain, fields[c],
                               rel.schema.columns[c].name);
      }
      rel.append_row(row);
    }
    db.tables.emplace(name, std::move(rel));
  }
  return db;
}

}  // namespace synoq
