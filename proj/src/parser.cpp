#include "synoq/parser.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace synoq {

namespace {

enum class Tok { Ident, Number, String, Symbol, End };

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  int line = 1, col = 1;

  explicit Lexer(const std::string& s) : src(s) {}

  void advance(char c) {
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip_space() {
    while (pos < src.size()) {
      if (std::isspace(static_cast<unsigned char>(src[pos]))) {
        advance(src[pos]);
      } else if (src.compare(pos, 2, "--") == 0) {
        while (pos < src.size() && src[pos] != '\n') advance(src[pos]);
      } else {
        break;
      }
    }
  }

  Token next() {
    skip_space();
    if (pos >= src.size()) return {Tok::End, "", line, col};
    const int l = line, c = col;
    const char ch = src[pos];
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::string s;
      while (pos < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos])) ||
              src[pos] == '_')) {
        s.push_back(src[pos]);
        advance(src[pos]);
      }
      return {Tok::Ident, s, l, c};
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::string s;
      while (pos < src.size() &&
             std::isdigit(static_cast<unsigned char>(src[pos]))) {
        s.push_back(src[pos]);
        advance(src[pos]);
      }
      return {Tok::Number, s, l, c};
    }
    if (ch == '\'') {
      advance(ch);
      std::string s;
      while (pos < src.size() && src[pos] != '\'') {
        s.push_back(src[pos]);
        advance(src[pos]);
      }
      if (pos >= src.size()) {
        throw QuerySyntaxError("unterminated string literal", l, c);
      }
      advance('\'');
      return {Tok::String, s, l, c};
    }
    static const std::string two[] = {"<=", ">=", "<>", "!="};
    for (const std::string& t : two) {
      if (src.compare(pos, 2, t) == 0) {
        advance(src[pos]);
        advance(src[pos]);
        return {Tok::Symbol, t, l, c};
      }
    }
    advance(ch);
    return {Tok::Symbol, std::string(1, ch), l, c};
  }
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct Parser {
  Lexer lex;
  Token tok;
  const Database& db;

  Parser(const std::string& text, const Database& database)
      : lex(text), db(database) {
    tok = lex.next();
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw QuerySyntaxError(msg, tok.line, tok.col);
  }

  bool is_kw(const char* kw) const {
    return tok.kind == Tok::Ident && lower(tok.text) == kw;
  }

  void expect_kw(const char* kw) {
    if (!is_kw(kw)) fail(std::string("expected '") + kw + "'");
    tok = lex.next();
  }

  bool accept_sym(const char* s) {
    if (tok.kind == Tok::Symbol && tok.text == s) {
      tok = lex.next();
      return true;
    }
    return false;
  }

  std::string expect_ident(const char* what) {
    if (tok.kind != Tok::Ident) fail(std::string("expected ") + what);
    std::string s = tok.text;
    tok = lex.next();
    return s;
  }

  // ident('.'ident)* with up to three parts (schema.table.attr)
  std::vector<std::string> dotted() {
    std::vector<std::string> parts{expect_ident("identifier")};
    while (accept_sym(".")) parts.push_back(expect_ident("identifier"));
    if (parts.size() > 3) fail("too many name qualifiers");
    return parts;
  }

  struct ColRef {
    std::string alias, attr;
    int line, col;
  };

  LogicalQuery q;

  std::string resolve_alias(const std::vector<std::string>& parts, int line,
                            int col) {
    // last element is the attribute; the one before names an alias or table
    if (parts.size() == 1) {
      // bare attribute: unique table containing it
      std::string found;
      for (const TableRef& t : q.relations) {
        if (db.table(t.table).schema.has_column(parts[0])) {
          if (!found.empty()) {
            throw QuerySyntaxError("ambiguous column '" + parts[0] + "'",
                                   line, col);
          }
          found = t.alias;
        }
      }
      if (found.empty()) {
        throw QuerySyntaxError("unknown column '" + parts[0] + "'", line, col);
      }
      return found;
    }
    const std::string& name = parts[parts.size() - 2];
    if (q.find_alias(name)) return name;
    for (const TableRef& t : q.relations) {
      if (t.table == name) return t.alias;
    }
    throw QuerySyntaxError("unknown table or alias '" + name + "'", line, col);
  }

  ColRef colref() {
    const int l = tok.line, c = tok.col;
    auto parts = dotted();
    ColRef ref;
    ref.line = l;
    ref.col = c;
    ref.attr = parts.back();
    ref.alias = resolve_alias(parts, l, c);
    const TableRef* t = q.find_alias(ref.alias);
    if (!db.table(t->table).schema.has_column(ref.attr)) {
      throw QuerySyntaxError(
          "table '" + t->table + "' has no column '" + ref.attr + "'", l, c);
    }
    return ref;
  }

  std::string qualified(const ColRef& r) const { return r.alias + "." + r.attr; }

  // Select-list items are collected before FROM is known, so column
  // references stay unresolved until the table list is parsed.
  struct SelectItem {
    bool is_agg = false;
    AggKind kind = AggKind::None;
    bool star_arg = false;
    std::vector<std::string> parts;
    int line = 0, col = 0;
  };

  SelectItem select_item() {
    SelectItem item;
    item.line = tok.line;
    item.col = tok.col;
    if (is_kw("count") || is_kw("sum") || is_kw("min") || is_kw("max")) {
      const std::string fn = lower(tok.text);
      tok = lex.next();
      if (!accept_sym("(")) fail("expected '(' after aggregate");
      item.is_agg = true;
      if (fn == "count") {
        if (is_kw("distinct")) {
          tok = lex.next();
          item.kind = AggKind::CountDistinct;
          item.parts = dotted();
        } else if (accept_sym("*")) {
          item.kind = AggKind::Count;
          item.star_arg = true;
        } else {
          item.kind = AggKind::Count;
          item.parts = dotted();
        }
      } else {
        item.kind = fn == "sum"   ? AggKind::Sum
                    : fn == "min" ? AggKind::Min
                                  : AggKind::Max;
        item.parts = dotted();
      }
      if (!accept_sym(")")) fail("expected ')'");
      return item;
    }
    item.parts = dotted();
    return item;
  }

  ColRef resolve_item_col(const SelectItem& item) {
    ColRef ref;
    ref.line = item.line;
    ref.col = item.col;
    ref.attr = item.parts.back();
    ref.alias = resolve_alias(item.parts, item.line, item.col);
    const TableRef* t = q.find_alias(ref.alias);
    if (!db.table(t->table).schema.has_column(ref.attr)) {
      throw QuerySyntaxError("table '" + t->table + "' has no column '" +
                                 ref.attr + "'",
                             item.line, item.col);
    }
    return ref;
  }

  void parse_from() {
    expect_kw("from");
    while (true) {
      auto parts = dotted();  // [schema.]table
      if (parts.size() > 2) fail("table reference has too many qualifiers");
      TableRef ref;
      ref.table = parts.back();
      if (!db.has_table(ref.table)) fail("unknown table '" + ref.table + "'");
      if (tok.kind == Tok::Ident && !is_kw("where") && !is_kw("group") &&
          !is_kw("order")) {
        ref.alias = tok.text;
        tok = lex.next();
      } else {
        ref.alias = ref.table;
      }
      if (q.find_alias(ref.alias)) fail("duplicate alias '" + ref.alias + "'");
      q.relations.push_back(ref);
      if (!accept_sym(",")) break;
    }
  }

  i64 literal_for(const ColRef& r, const Token& lit) {
    const TableRef* t = q.find_alias(r.alias);
    const AttrDomain& d = db.table(t->table).schema.domain(r.attr);
    if (lit.kind == Tok::String) {
      return db.table(t->table).schema.encode_value(r.attr, lit.text);
    }
    if (d.kind == AttrKind::Categorical) {
      throw QuerySyntaxError("numeric literal on categorical column", lit.line,
                             lit.col);
    }
    return std::stoll(lit.text);
  }

  void add_condition(const ColRef& r, const std::string& op, i64 v) {
    const TableRef* t = q.find_alias(r.alias);
    const AttrDomain& d = db.table(t->table).schema.domain(r.attr);
    ValueSet vals;
    if (op == "=") {
      vals = ValueSet::point(v);
    } else if (op == ">") {
      vals = ValueSet::range(v + 1, d.hi);
    } else if (op == ">=") {
      vals = ValueSet::range(v, d.hi);
    } else if (op == "<") {
      vals = ValueSet::range(d.lo, v - 1);
    } else if (op == "<=") {
      vals = ValueSet::range(d.lo, v);
    } else {
      throw UnsupportedFeature("unsupported comparison '" + op + "'");
    }
    if (!vals.ranges.empty() && vals.ranges[0].first > vals.ranges[0].second) {
      vals.ranges.clear();  // contradiction; empty match set
    }
    q.filters[r.alias].conjuncts.push_back({r.attr, vals});
  }

  void parse_where() {
    if (!is_kw("where")) return;
    tok = lex.next();
    while (true) {
      ColRef left = colref();
      std::string op;
      if (tok.kind == Tok::Symbol &&
          (tok.text == "=" || tok.text == "<" || tok.text == ">" ||
           tok.text == "<=" || tok.text == ">=")) {
        op = tok.text;
        tok = lex.next();
      } else {
        fail("expected comparison operator");
      }
      if (tok.kind == Tok::Ident) {
        if (op != "=") {
          throw UnsupportedFeature("only equality joins are supported");
        }
        ColRef right = colref();
        q.joins.push_back({left.alias, left.attr, right.alias, right.attr});
      } else if (tok.kind == Tok::Number || tok.kind == Tok::String) {
        const Token lit = tok;
        tok = lex.next();
        add_condition(left, op, literal_for(left, lit));
      } else {
        fail("expected literal or column");
      }
      if (is_kw("and")) {
        tok = lex.next();
        continue;
      }
      break;
    }
  }

  LogicalQuery parse() {
    expect_kw("select");
    std::vector<SelectItem> items;
    if (accept_sym("*")) {
      q.select_star = true;
    } else {
      items.push_back(select_item());
      while (accept_sym(",")) items.push_back(select_item());
    }
    parse_from();
    parse_where();

    std::optional<std::string> group_col;
    if (is_kw("group")) {
      tok = lex.next();
      expect_kw("by");
      group_col = qualified(colref());
    }
    bool order_by_agg = false;
    if (is_kw("order")) {
      tok = lex.next();
      expect_kw("by");
      if (is_kw("count") || is_kw("sum") || is_kw("min") || is_kw("max")) {
        SelectItem o = select_item();
        (void)o;
        order_by_agg = true;
      } else {
        throw UnsupportedFeature("ORDER BY supports aggregate values only");
      }
    }
    accept_sym(";");
    if (tok.kind != Tok::End) fail("unexpected trailing input");

    // assemble the aggregation spec
    if (q.select_star) {
      if (group_col) throw UnsupportedFeature("GROUP BY requires aggregates");
      q.agg.kind = AggKind::None;
      for (const TableRef& t : q.relations) {
        for (const Column& c : db.table(t.table).schema.columns) {
          q.select_columns.push_back(t.alias + "." + c.name);
        }
      }
    } else {
      const SelectItem* agg_item = nullptr;
      std::vector<const SelectItem*> plain;
      for (const SelectItem& it : items) {
        if (it.is_agg) {
          if (agg_item) {
            throw UnsupportedFeature("a single aggregate per query");
          }
          agg_item = &it;
        } else {
          plain.push_back(&it);
        }
      }
      if (!agg_item) {
        throw UnsupportedFeature("select list needs an aggregate or '*'");
      }
      q.agg.kind = agg_item->kind;
      if (!agg_item->star_arg) {
        q.agg.attr = qualified(resolve_item_col(*agg_item));
      }
      if (group_col) {
        if (q.agg.kind != AggKind::Count) {
          throw UnsupportedFeature("GROUP BY supports count aggregation");
        }
        if (plain.size() != 1 ||
            qualified(resolve_item_col(*plain[0])) != *group_col) {
          throw UnsupportedFeature(
              "group query selects the grouping column plus one aggregate");
        }
        q.agg.group_by = group_col;
        q.agg.order_by_agg = order_by_agg;
        q.select_columns = {*group_col};
      } else if (!plain.empty()) {
        throw UnsupportedFeature("plain columns require GROUP BY");
      }
    }
    return q;
  }
};

}  // namespace

LogicalQuery parse_query(const std::string& text, const Database& db) {
  Parser p(text, db);
  return p.parse();
}

std::string unparse(const LogicalQuery& q, const Database& db) {
  std::ostringstream out;
  out << "SELECT ";
  if (q.select_star) {
    out << "*";
  } else {
    bool first = true;
    if (q.agg.group_by) {
      out << *q.agg.group_by;
      first = false;
    }
    auto agg_name = [&]() -> std::string {
      switch (q.agg.kind) {
        case AggKind::Count: return "count";
        case AggKind::CountDistinct: return "count";
        case AggKind::Sum: return "sum";
        case AggKind::Min: return "min";
        case AggKind::Max: return "max";
        case AggKind::None: return "";
      }
      return "";
    }();
    if (!agg_name.empty()) {
      if (!first) out << ", ";
      out << agg_name << "(";
      if (q.agg.kind == AggKind::CountDistinct) out << "distinct ";
      out << (q.agg.attr.empty() ? "*" : q.agg.attr) << ")";
    }
  }
  out << " FROM ";
  for (size_t i = 0; i < q.relations.size(); ++i) {
    if (i) out << ", ";
    out << q.relations[i].table;
    if (q.relations[i].alias != q.relations[i].table) {
      out << " " << q.relations[i].alias;
    }
  }
  std::vector<std::string> conds;
  for (const JoinEdge& e : q.joins) {
    conds.push_back(e.left_alias + "." + e.left_attr + " = " + e.right_alias +
                    "." + e.right_attr);
  }
  for (const auto& [alias, pred] : q.filters) {
    const TableRef* t = q.find_alias(alias);
    const TableSchema& schema = db.table(t->table).schema;
    for (const AttrCondition& c : pred.conjuncts) {
      const AttrDomain& d = schema.domain(c.attr);
      for (const auto& [lo, hi] : c.vals.ranges) {
        std::string col = alias + "." + c.attr;
        auto lit = [&](i64 v) -> std::string {
          if (d.kind == AttrKind::Categorical) {
            return "'" + d.dict.at(static_cast<size_t>(v)) + "'";
          }
          return std::to_string(v);
        };
        if (lo == hi) {
          conds.push_back(col + " = " + lit(lo));
        } else if (lo == d.lo) {
          conds.push_back(col + " <= " + lit(hi));
        } else if (hi == d.hi) {
          conds.push_back(col + " >= " + lit(lo));
        } else {
          conds.push_back(col + " >= " + lit(lo));
          conds.push_back(col + " <= " + lit(hi));
        }
      }
    }
  }
  if (!conds.empty()) {
    out << " WHERE ";
    for (size_t i = 0; i < conds.size(); ++i) {
      if (i) out << " and ";
      out << conds[i];
    }
  }
  if (q.agg.group_by) {
    out << " GROUP BY " << *q.agg.group_by;
    if (q.agg.order_by_agg) {
      out << " ORDER BY count(" << q.agg.attr << ")";
    }
  }
  out << ";";
  return out.str();
}

std::vector<std::string> split_statements(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  bool in_string = false;
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (!in_string && c == '-' && i + 1 < text.size() && text[i + 1] == '-') {
      while (i < text.size() && text[i] != '\n') ++i;
      cur.push_back('\n');
      continue;
    }
    if (c == '\'') in_string = !in_string;
    if (c == ';' && !in_string) {
      bool blank = true;
      for (char ch : cur) {
        if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
      }
      if (!blank) out.push_back(cur);
      cur.clear();
      continue;
    }
    cur.push_back(c);
  }
  bool blank = true;
  for (char ch : cur) {
    if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
  }
  if (!blank) out.push_back(cur);
  return out;
}

}  // namespace synoq
