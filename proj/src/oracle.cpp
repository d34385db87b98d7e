#include "synoq/oracle.hpp"

#include <algorithm>
#include <unordered_map>

namespace synoq {

void QueryResult::canonicalize() { std::sort(rows.begin(), rows.end()); }

namespace {

std::vector<size_t> filter_rows(const Relation& rel, const Predicate& pred) {
  const Predicate fused = pred.fused();
  std::vector<int> cols;
  for (const AttrCondition& c : fused.conjuncts) {
    cols.push_back(rel.schema.column_index(c.attr));
  }
  std::vector<size_t> out;
  for (size_t r = 0; r < rel.row_count(); ++r) {
    bool ok = true;
    for (size_t k = 0; k < cols.size(); ++k) {
      if (!fused.conjuncts[k].vals.contains(
              rel.at(r, static_cast<size_t>(cols[k])))) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(r);
  }
  return out;
}

struct Hash {
  size_t operator()(const std::vector<i64>& v) const {
    size_t h = 1469598103934665603ull;
    for (i64 x : v) {
      h ^= static_cast<size_t>(x);
      h *= 1099511628211ull;
    }
    return h;
  }
};

// Left-deep plaintext join over filtered row ids, alias order as given.
// Tuples are maps alias -> row id, stored positionally.
struct Joiner {
  const LogicalQuery& q;
  const Database& db;
  std::vector<std::string> order;
  std::vector<const Relation*> rels;
  std::vector<std::vector<size_t>> tuples;  // row id per placed alias

  Joiner(const LogicalQuery& query, const Database& database,
         std::vector<std::string> alias_order)
      : q(query), db(database), order(std::move(alias_order)) {}

  int placed_index(const std::string& alias) const {
    for (size_t i = 0; i < order.size(); ++i) {
      if (order[i] == alias) return static_cast<int>(i);
    }
    return -1;
  }

  void run(std::vector<JoinSizeStep>* steps) {
    std::vector<std::string> placed;
    for (size_t k = 0; k < order.size(); ++k) {
      const std::string& alias = order[k];
      const TableRef* ref = q.find_alias(alias);
      const Relation& rel = db.table(ref->table);
      rels.push_back(&rel);
      auto fit = q.filters.find(alias);
      std::vector<size_t> rows =
          fit == q.filters.end() ? filter_rows(rel, {}) : filter_rows(rel, fit->second);
      if (k == 0) {
        for (size_t r : rows) tuples.push_back({r});
        placed.push_back(alias);
        continue;
      }
      const auto edges = q.edges_between(alias, placed);
      JoinSizeStep step;
      step.cartesian_size =
          static_cast<i64>(tuples.size()) * static_cast<i64>(rows.size());
      std::vector<std::vector<size_t>> next;
      if (edges.empty()) {
        for (const auto& t : tuples) {
          for (size_t r : rows) {
            auto nt = t;
            nt.push_back(r);
            next.push_back(std::move(nt));
          }
        }
      } else {
        // hash the new relation's rows by the edge key tuple
        std::unordered_map<std::vector<i64>, std::vector<size_t>, Hash> index;
        std::vector<int> rcols;
        for (const JoinEdge& e : edges) {
          rcols.push_back(rel.schema.column_index(e.right_attr));
        }
        for (size_t r : rows) {
          std::vector<i64> key;
          for (int c : rcols) key.push_back(rel.at(r, static_cast<size_t>(c)));
          index[key].push_back(r);
        }
        std::vector<std::pair<int, int>> lcols;  // (placed idx, col)
        for (const JoinEdge& e : edges) {
          const int pi = placed_index(e.left_alias);
          const TableRef* lref = q.find_alias(e.left_alias);
          lcols.emplace_back(
              pi, db.table(lref->table).schema.column_index(e.left_attr));
        }
        for (const auto& t : tuples) {
          std::vector<i64> key;
          for (const auto& [pi, c] : lcols) {
            key.push_back(rels[static_cast<size_t>(pi)]->at(
                t[static_cast<size_t>(pi)], static_cast<size_t>(c)));
          }
          auto it = index.find(key);
          if (it == index.end()) continue;
          for (size_t r : it->second) {
            auto nt = t;
            nt.push_back(r);
            next.push_back(std::move(nt));
          }
        }
      }
      tuples = std::move(next);
      step.true_size = static_cast<i64>(tuples.size());
      if (steps) steps->push_back(step);
      placed.push_back(alias);
    }
  }

  i64 value(const std::vector<size_t>& tuple, const std::string& qualified)
      const {
    const auto dot = qualified.find('.');
    const std::string alias = qualified.substr(0, dot);
    const std::string attr = qualified.substr(dot + 1);
    const int pi = placed_index(alias);
    const Relation& rel = *rels[static_cast<size_t>(pi)];
    return rel.at(tuple[static_cast<size_t>(pi)],
                  static_cast<size_t>(rel.schema.column_index(attr)));
  }
};

}  // namespace

QueryResult oracle_execute(const LogicalQuery& q, const Database& db) {
  std::vector<std::string> order;
  for (const TableRef& t : q.relations) order.push_back(t.alias);
  Joiner joiner(q, db, order);
  joiner.run(nullptr);

  QueryResult out;
  switch (q.agg.kind) {
    case AggKind::None: {
      for (const auto& t : joiner.tuples) {
        std::vector<i64> row;
        for (const std::string& col : q.select_columns) {
          row.push_back(joiner.value(t, col));
        }
        out.rows.push_back(std::move(row));
      }
      break;
    }
    case AggKind::Count: {
      if (q.agg.group_by) {
        std::map<i64, i64> groups;
        for (const auto& t : joiner.tuples) {
          ++groups[joiner.value(t, *q.agg.group_by)];
        }
        for (const auto& [k, c] : groups) out.rows.push_back({k, c});
      } else {
        out.rows.push_back({static_cast<i64>(joiner.tuples.size())});
      }
      break;
    }
    case AggKind::CountDistinct: {
      std::vector<i64> vals;
      for (const auto& t : joiner.tuples) {
        vals.push_back(joiner.value(t, q.agg.attr));
      }
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      out.rows.push_back({static_cast<i64>(vals.size())});
      break;
    }
    case AggKind::Sum: {
      if (joiner.tuples.empty()) break;
      u32 acc = 0;  // 32-bit ring semantics
      for (const auto& t : joiner.tuples) {
        acc += static_cast<u32>(joiner.value(t, q.agg.attr));
      }
      out.rows.push_back({static_cast<i64>(acc)});
      break;
    }
    case AggKind::Min:
    case AggKind::Max: {
      if (joiner.tuples.empty()) break;
      i64 best = joiner.value(joiner.tuples[0], q.agg.attr);
      for (const auto& t : joiner.tuples) {
        const i64 v = joiner.value(t, q.agg.attr);
        best = q.agg.kind == AggKind::Min ? std::min(best, v)
                                          : std::max(best, v);
      }
      out.rows.push_back({best});
      break;
    }
  }
  out.canonicalize();
  return out;
}

std::vector<JoinSizeStep> simulate_join_sizes(
    const LogicalQuery& q, const Database& db,
    const std::vector<std::string>& order) {
  Joiner joiner(q, db, order);
  std::vector<JoinSizeStep> steps;
  joiner.run(&steps);
  return steps;
}

std::map<std::string, i64> filtered_sizes(const LogicalQuery& q,
                                          const Database& db) {
  std::map<std::string, i64> out;
  for (const TableRef& t : q.relations) {
    const Relation& rel = db.table(t.table);
    auto fit = q.filters.find(t.alias);
    const Predicate pred = fit == q.filters.end() ? Predicate{} : fit->second;
    out[t.alias] = static_cast<i64>(filter_rows(rel, pred).size());
  }
  return out;
}

}  // namespace synoq
