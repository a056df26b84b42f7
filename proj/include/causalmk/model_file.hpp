#pragma once

/*
 * Line-oriented model files (.ck).
 *
 *   # comment
 *   worlds w0 w1 w2
 *   relation w0->w1 w0->w2          (or: relation all)
 *   exogenous U in {0,1}            (or a span: 0..3)
 *   exogenous U@w2 in {0,1,2}       range override for one pair
 *   endogenous p in {0,1}
 *   equation p@* = U=1              formula equation for every world
 *   equation q@w0 = dia(p=1)        a specific world overrides '*'
 *   table x@* U V@w1 : 0 0 -> 1; 0 1 -> 0; 1 0 -> 0; 1 1 -> 2
 *   table y@w0 : -> 2               constant
 *   context t U@w0=1 U@*=0          repeated lines with one name accumulate
 *   query q1 cause context=t world=w0 candidate="p@w3=1" event="q=1" def=original expect=holds
 *
 * In a table a bare parent name means the target's own world. Every line
 * kind may appear in any order; the model is built once the whole file has
 * been read.
 */

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "causalmk/error.hpp"
#include "causalmk/formula.hpp"
#include "causalmk/model.hpp"
#include "causalmk/parser.hpp"
#include "causalmk/semantics.hpp"

namespace causalmk {

struct QueryLine {
  std::string name;
  std::string kind;
  std::vector<std::pair<std::string, std::string>> options;
  std::size_t line = 0;

  std::optional<std::string> get(std::string_view key) const {
    for (const auto& [k, v] : options)
      if (k == key) return v;
    return std::nullopt;
  }
};

struct ModelFile {
  std::shared_ptr<const Model> model;
  std::vector<std::pair<std::string, Context>> contexts;
  std::vector<QueryLine> queries;

  const Context& context(std::string_view name) const {
    for (const auto& [n, c] : contexts)
      if (n == name) return c;
    throw DanglingRefError("unknown context '" + std::string(name) + "'");
  }

  Setting setting(std::string_view context_name) const { return Setting(model, context(context_name)); }
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline bool is_name(std::string_view s) {
  if (s.empty() || !is_ident_start(s[0])) return false;
  return std::all_of(s.begin(), s.end(), is_ident_char);
}

inline bool bare_value(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '@' || c == '-';
  });
}

inline std::string quote(std::string_view s) {
  if (bare_value(s)) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

class ModelFileReader {
 public:
  ModelFile read(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      ++line_no;
      line_ = line_no;
      std::string line = trim(text.substr(start, end - start));
      if (!line.empty() && line[0] != '#') statement(line);
      if (end == text.size()) break;
      start = end + 1;
    }
    return build();
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ModelFileError(message, line_);
  }

  void statement(const std::string& line) {
    std::size_t sp = line.find_first_of(" \t");
    std::string keyword = line.substr(0, sp);
    std::string rest = sp == std::string::npos ? std::string() : trim(std::string_view(line).substr(sp));
    if (keyword == "worlds") return worlds_line(rest);
    if (keyword == "relation") return relation_line(rest);
    if (keyword == "exogenous") return variable_line(rest, true);
    if (keyword == "endogenous") return variable_line(rest, false);
    if (keyword == "equation") return equation_line(rest);
    if (keyword == "table") return table_line(rest);
    if (keyword == "context") return context_line(rest);
    if (keyword == "query") return query_line(rest);
    fail("unknown keyword '" + keyword + "'");
  }

  void worlds_line(const std::string& rest) {
    if (worlds_line_) fail("worlds declared twice (first on line " + std::to_string(worlds_line_) + ")");
    worlds_line_ = line_;
    for (const auto& w : split_ws(rest)) {
      if (!is_name(w) || w == "*") fail("bad world name '" + w + "'");
      if (std::find(worlds_.begin(), worlds_.end(), w) != worlds_.end()) fail("world '" + w + "' listed twice");
      worlds_.push_back(w);
    }
    if (worlds_.empty()) fail("a model needs at least one world");
  }

  void relation_line(const std::string& rest) {
    if (relation_line_) fail("relation declared twice (first on line " + std::to_string(relation_line_) + ")");
    relation_line_ = line_;
    auto toks = split_ws(rest);
    if (toks.size() == 1 && toks[0] == "all") {
      relation_all_ = true;
      return;
    }
    for (const auto& t : toks) {
      std::size_t arrow = t.find("->");
      if (arrow == std::string::npos) fail("relation pair must look like a->b, found '" + t + "'");
      std::string a = t.substr(0, arrow), b = t.substr(arrow + 2);
      if (!is_name(a) || !is_name(b)) fail("bad relation pair '" + t + "'");
      relation_.emplace_back(a, b);
      relation_lines_.push_back(line_);
    }
  }

  Range range_spec(const std::string& text) {
    std::string s = trim(text);
    Range r;
    auto integer = [&](const std::string& t) -> Value {
      try {
        std::size_t used = 0;
        int v = std::stoi(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return v;
      } catch (const std::exception&) {
        fail("bad integer '" + t + "' in range");
      }
    };
    if (s.size() >= 2 && s.front() == '{' && s.back() == '}') {
      std::string body = s.substr(1, s.size() - 2);
      std::stringstream in(body);
      std::string item;
      while (std::getline(in, item, ',')) r.push_back(integer(trim(item)));
    } else if (auto dots = s.find(".."); dots != std::string::npos) {
      Value lo = integer(trim(s.substr(0, dots))), hi = integer(trim(s.substr(dots + 2)));
      if (hi < lo || hi - lo > 1024) fail("bad range span '" + s + "'");
      for (Value v = lo; v <= hi; ++v) r.push_back(v);
    } else {
      fail("range must be {a,b,...} or lo..hi, found '" + s + "'");
    }
    if (r.empty()) fail("empty range");
    return r;
  }

  // "V" or "V@w" or "V@*"; world empty for a bare name.
  std::pair<std::string, std::string> target(const std::string& tok, bool allow_bare) {
    std::size_t at = tok.find('@');
    if (at == std::string::npos) {
      if (!allow_bare) fail("expected V@world, found '" + tok + "'");
      if (!is_name(tok)) fail("bad variable name '" + tok + "'");
      return {tok, ""};
    }
    std::string v = tok.substr(0, at), w = tok.substr(at + 1);
    if (!is_name(v) || (w != "*" && !is_name(w))) fail("bad pair '" + tok + "'");
    return {v, w};
  }

  void variable_line(const std::string& rest, bool exo) {
    std::size_t in = rest.find(" in ");
    if (in == std::string::npos) fail("expected 'NAME in RANGE'");
    auto [v, w] = target(trim(rest.substr(0, in)), true);
    Range r = range_spec(rest.substr(in + 4));
    if (w.empty()) {
      if (kinds_.count(v)) fail("variable '" + v + "' declared twice");
      kinds_[v] = exo;
      order_.push_back(v);
      ranges_[v] = r;
    } else {
      auto it = kinds_.find(v);
      if (it == kinds_.end()) fail("range override for undeclared variable '" + v + "'");
      if (it->second != exo) fail("range override for '" + v + "' uses the wrong kind");
      if (w == "*") fail("use the plain declaration for the default range of '" + v + "'");
      if (!overrides_.emplace(PairRef{v, w}, r).second) fail("range of " + v + "@" + w + " overridden twice");
      override_lines_[{v, w}] = line_;
    }
  }

  void put_equation(const std::string& v, const std::string& w, Equation eq) {
    auto& slot = w == "*" ? star_equations_ : equations_;
    PairRef key{v, w == "*" ? std::string() : w};
    if (slot.count(key) || (w == "*" ? star_tables_ : tables_).count(key))
      fail("second equation for " + v + "@" + w);
    slot.emplace(key, std::make_pair(std::move(eq), line_));
  }

  void equation_line(const std::string& rest) {
    std::size_t eq = rest.find('=');
    if (eq == std::string::npos) fail("expected 'equation V@w = formula'");
    auto [v, w] = target(trim(rest.substr(0, eq)), false);
    std::string text = rest.substr(eq + 1);
    try {
      Formula f = parse(text);
      if (!f.is_event()) fail("equation bodies cannot contain interventions");
      put_equation(v, w, FormulaEquation{f});
    } catch (const SyntaxError& e) {
      fail(std::string("in equation: ") + e.what());
    } catch (const NestedInterventionError& e) {
      fail(std::string("in equation: ") + e.what());
    }
  }

  void table_line(const std::string& rest) {
    std::size_t colon = rest.find(':');
    if (colon == std::string::npos) fail("expected 'table V@w PARENTS : rows'");
    auto head = split_ws(rest.substr(0, colon));
    if (head.empty()) fail("table without a target");
    auto [v, w] = target(head[0], false);
    TableRows t;
    for (std::size_t i = 1; i < head.size(); ++i) t.parents.push_back(target(head[i], true));
    std::stringstream rows(rest.substr(colon + 1));
    std::string row;
    while (std::getline(rows, row, ';')) {
      row = trim(row);
      if (row.empty()) continue;
      std::size_t arrow = row.find("->");
      if (arrow == std::string::npos) fail("table row must look like 'a b -> c', found '" + row + "'");
      std::vector<Value> key;
      for (const auto& tok : split_ws(row.substr(0, arrow))) key.push_back(parse_int(tok));
      auto out = split_ws(row.substr(arrow + 2));
      if (out.size() != 1) fail("table row needs exactly one output, found '" + row + "'");
      if (key.size() != t.parents.size()) fail("table row '" + row + "' has wrong arity");
      if (!t.rows.emplace(key, parse_int(out[0])).second) fail("table row '" + row + "' repeats a key");
    }
    if (t.rows.empty()) fail("table without rows");
    auto& slot = w == "*" ? star_tables_ : tables_;
    PairRef key{v, w == "*" ? std::string() : w};
    if (slot.count(key) || (w == "*" ? star_equations_ : equations_).count(key))
      fail("second equation for " + v + "@" + w);
    t.line = line_;
    slot.emplace(key, std::move(t));
  }

  Value parse_int(const std::string& tok) {
    try {
      std::size_t used = 0;
      int v = std::stoi(tok, &used);
      if (used == tok.size()) return v;
    } catch (const std::exception&) {
    }
    fail("bad integer '" + tok + "'");
  }

  void context_line(const std::string& rest) {
    auto toks = split_ws(rest);
    if (toks.empty() || !is_name(toks[0])) fail("expected 'context NAME V@w=v ...'");
    auto& ctx = contexts_[toks[0]];
    if (ctx.line == 0) {
      ctx.line = line_;
      context_order_.push_back(toks[0]);
    }
    for (std::size_t i = 1; i < toks.size(); ++i) {
      std::size_t eq = toks[i].find('=');
      if (eq == std::string::npos) fail("context entry must look like V@w=v, found '" + toks[i] + "'");
      auto [v, w] = target(toks[i].substr(0, eq), false);
      Value val = parse_int(toks[i].substr(eq + 1));
      auto& slot = w == "*" ? ctx.star : ctx.specific;
      if (!slot.emplace(PairRef{v, w == "*" ? std::string() : w}, std::make_pair(val, line_)).second)
        fail("context '" + toks[0] + "' assigns " + toks[i].substr(0, eq) + " twice");
    }
  }

  void query_line(const std::string& rest) {
    QueryLine q;
    q.line = line_;
    std::size_t i = 0;
    auto skip = [&] {
      while (i < rest.size() && std::isspace(static_cast<unsigned char>(rest[i]))) ++i;
    };
    auto word = [&] {
      skip();
      std::size_t s = i;
      while (i < rest.size() && !std::isspace(static_cast<unsigned char>(rest[i])) && rest[i] != '=') ++i;
      return rest.substr(s, i - s);
    };
    q.name = word();
    q.kind = word();
    if (!is_name(q.name) || q.kind.empty()) fail("expected 'query NAME KIND key=value ...'");
    while (true) {
      skip();
      if (i >= rest.size()) break;
      std::string key = word();
      if (i >= rest.size() || rest[i] != '=' || !is_name(key)) fail("query options must look like key=value");
      ++i;
      std::string value;
      if (i < rest.size() && rest[i] == '"') {
        ++i;
        bool closed = false;
        while (i < rest.size()) {
          char c = rest[i++];
          if (c == '\\' && i < rest.size()) {
            value += rest[i++];
          } else if (c == '"') {
            closed = true;
            break;
          } else {
            value += c;
          }
        }
        if (!closed) fail("unterminated quoted value for '" + key + "'");
      } else {
        std::size_t s = i;
        while (i < rest.size() && !std::isspace(static_cast<unsigned char>(rest[i]))) ++i;
        value = rest.substr(s, i - s);
      }
      if (q.get(key)) fail("query option '" + key + "' given twice");
      q.options.emplace_back(key, value);
    }
    for (const auto& other : queries_)
      if (other.name == q.name) fail("query '" + q.name + "' declared twice");
    queries_.push_back(std::move(q));
  }

  struct TableRows {
    std::vector<std::pair<std::string, std::string>> parents;
    std::map<std::vector<Value>, Value> rows;
    std::size_t line = 0;
  };

  struct ContextEntries {
    std::map<PairRef, std::pair<Value, std::size_t>> star;  // world left empty
    std::map<PairRef, std::pair<Value, std::size_t>> specific;
    std::size_t line = 0;
  };

  void check_world(const std::string& w) const {
    if (std::find(worlds_.begin(), worlds_.end(), w) == worlds_.end())
      throw ModelFileError("unknown world '" + w + "'", line_);
  }

  ModelFile build() {
    line_ = worlds_line_;
    if (!worlds_line_) throw ModelFileError("missing 'worlds' line", 1);

    Signature sig;
    for (const auto& v : order_) {
      if (kinds_[v]) sig.add_exogenous(v, ranges_[v]);
      else sig.add_endogenous(v, ranges_[v]);
    }
    for (const auto& [p, r] : overrides_) {
      line_ = override_lines_[p];
      check_world(p.world);
      sig.set_range(p.variable, p.world, r);
    }

    std::vector<std::pair<std::string, std::string>> relation;
    if (relation_all_) {
      for (const auto& a : worlds_)
        for (const auto& b : worlds_) relation.emplace_back(a, b);
    } else {
      for (std::size_t i = 0; i < relation_.size(); ++i) {
        line_ = relation_lines_[i];
        check_world(relation_[i].first);
        check_world(relation_[i].second);
        relation.push_back(relation_[i]);
      }
    }

    std::map<PairRef, Equation> equations;
    auto endogenous = [&](const std::string& v, std::size_t line) {
      line_ = line;
      auto it = kinds_.find(v);
      if (it == kinds_.end()) fail("equation for undeclared variable '" + v + "'");
      if (it->second) fail("equation for exogenous variable '" + v + "'");
    };
    auto table_for = [&](const TableRows& t, const std::string& world) {
      TableEquation te;
      for (const auto& [pv, pw] : t.parents) te.parents.push_back({pv, pw.empty() || pw == "*" ? world : pw});
      te.rows = t.rows;
      return Equation(te);
    };
    for (const auto& [p, e] : star_equations_) {
      endogenous(p.variable, e.second);
      for (const auto& w : worlds_) equations[{p.variable, w}] = e.first;
    }
    for (const auto& [p, t] : star_tables_) {
      endogenous(p.variable, t.line);
      for (const auto& w : worlds_) equations[{p.variable, w}] = table_for(t, w);
    }
    std::set<PairRef> specific;
    for (const auto& [p, e] : equations_) {
      endogenous(p.variable, e.second);
      check_world(p.world);
      specific.insert(p);
      equations[p] = e.first;
    }
    for (const auto& [p, t] : tables_) {
      endogenous(p.variable, t.line);
      check_world(p.world);
      if (!specific.insert(p).second) fail("second equation for " + to_string(p));
      equations[p] = table_for(t, p.world);
    }

    ModelFile out;
    out.model = std::make_shared<const Model>(build_model(sig, worlds_, relation, equations));

    for (const auto& name : context_order_) {
      const auto& entries = contexts_[name];
      line_ = entries.line;
      std::map<PairRef, Value> values;
      for (const auto& [p, e] : entries.star) {
        line_ = e.second;
        for (const auto& w : worlds_) values[{p.variable, w}] = e.first;
      }
      for (const auto& [p, e] : entries.specific) {
        line_ = e.second;
        check_world(p.world);
        values[p] = e.first;
      }
      line_ = entries.line;
      try {
        out.contexts.emplace_back(name, Context(*out.model, values));
      } catch (const ModelError& e) {
        fail("context '" + name + "': " + e.what());
      }
    }
    out.queries = queries_;
    return out;
  }

  std::size_t line_ = 0;
  std::vector<std::string> worlds_;
  std::size_t worlds_line_ = 0;
  std::vector<std::pair<std::string, std::string>> relation_;
  std::vector<std::size_t> relation_lines_;
  std::size_t relation_line_ = 0;
  bool relation_all_ = false;
  std::map<std::string, bool> kinds_;
  std::vector<std::string> order_;
  std::map<std::string, Range> ranges_;
  std::map<PairRef, Range> overrides_;
  std::map<PairRef, std::size_t> override_lines_;
  std::map<PairRef, std::pair<Equation, std::size_t>> equations_;
  std::map<PairRef, std::pair<Equation, std::size_t>> star_equations_;
  std::map<PairRef, TableRows> tables_;
  std::map<PairRef, TableRows> star_tables_;
  std::map<std::string, ContextEntries> contexts_;
  std::vector<std::string> context_order_;
  std::vector<QueryLine> queries_;
};

inline std::string range_text(const Range& r) {
  std::string s = "{";
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(r[i]);
  }
  return s + "}";
}

// Right-hand side of an equation line for `world`, with same-world table
// parents written bare so identical equations across worlds print alike.
inline std::string equation_text(const Equation& eq, const std::string& world, bool& is_table) {
  if (const auto* f = std::get_if<FormulaEquation>(&eq)) {
    is_table = false;
    return print(f->event);
  }
  is_table = true;
  const auto& t = std::get<TableEquation>(eq);
  std::string s;
  for (const auto& p : t.parents) s += " " + (p.world == world ? p.variable : to_string(p));
  s += " :";
  bool first = true;
  for (const auto& [key, out] : t.rows) {
    s += first ? " " : "; ";
    first = false;
    for (Value k : key) s += std::to_string(k) + " ";
    s += "-> " + std::to_string(out);
  }
  return s;
}

}  // namespace detail

inline ModelFile parse_model_file(std::string_view text) { return detail::ModelFileReader().read(text); }

inline ModelFile load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFileError("cannot open " + path.string(), 0);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model_file(buf.str());
}

// Canonical text. Reading it back gives an equal model, equal contexts and
// equal queries.
inline std::string write_model_file(const ModelFile& file) {
  const Model& m = *file.model;
  const Signature& sig = m.signature();
  std::string out = "worlds";
  for (const auto& w : m.worlds()) out += " " + w;
  out += "\n";

  if (!m.relation().empty()) {
    bool all = m.relation().size() == m.world_count() * m.world_count();
    out += "relation";
    if (all) {
      out += " all";
    } else {
      for (const auto& [a, b] : m.relation()) out += " " + a + "->" + b;
    }
    out += "\n";
  }

  auto declare = [&](const std::vector<std::string>& vars, const char* kind) {
    for (const auto& v : vars) {
      out += std::string(kind) + " " + v + " in " + detail::range_text(sig.default_range(v)) + "\n";
      for (const auto& [p, r] : sig.overrides())
        if (p.variable == v) out += std::string(kind) + " " + to_string(p) + " in " + detail::range_text(r) + "\n";
    }
  };
  declare(sig.exogenous(), "exogenous");
  declare(sig.endogenous(), "endogenous");

  for (const auto& v : sig.endogenous()) {
    std::vector<std::pair<std::string, bool>> texts;
    for (const auto& w : m.worlds()) {
      bool is_table = false;
      std::string t = detail::equation_text(m.equations().at({v, w}), w, is_table);
      texts.emplace_back(t, is_table);
    }
    bool uniform = std::all_of(texts.begin(), texts.end(), [&](const auto& t) { return t == texts.front(); });
    auto line = [&](const std::string& world, const std::pair<std::string, bool>& t) {
      if (t.second) out += "table " + v + "@" + world + t.first + "\n";
      else out += "equation " + v + "@" + world + " = " + t.first + "\n";
    };
    if (uniform && m.world_count() > 1) {
      line("*", texts.front());
    } else {
      for (std::size_t i = 0; i < m.world_count(); ++i) line(m.worlds()[i], texts[i]);
    }
  }

  for (const auto& [name, ctx] : file.contexts) {
    for (const auto& v : sig.exogenous()) {
      std::size_t vi = m.variable_index(v);
      std::vector<Value> vals;
      for (std::size_t w = 0; w < m.world_count(); ++w) vals.push_back(ctx.values()[m.node(vi, w)]);
      out += "context " + name;
      if (std::all_of(vals.begin(), vals.end(), [&](Value x) { return x == vals.front(); }) && m.world_count() > 1) {
        out += " " + v + "@*=" + std::to_string(vals.front());
      } else {
        for (std::size_t w = 0; w < m.world_count(); ++w)
          out += " " + v + "@" + m.worlds()[w] + "=" + std::to_string(vals[w]);
      }
      out += "\n";
    }
    if (sig.exogenous().empty()) out += "context " + name + "\n";
  }

  for (const auto& q : file.queries) {
    out += "query " + q.name + " " + q.kind;
    for (const auto& [k, v] : q.options) out += " " + k + "=" + detail::quote(v);
    out += "\n";
  }
  return out;
}

}  // namespace causalmk
