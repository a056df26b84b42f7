#pragma once

// Named queries over a model file: the shared core of the command line
// tool and of the golden checks stored in corpus files.

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "causalmk/axioms.hpp"
#include "causalmk/cause.hpp"
#include "causalmk/error.hpp"
#include "causalmk/model_file.hpp"
#include "causalmk/parser.hpp"
#include "causalmk/semantics.hpp"
#include "causalmk/sufficiency.hpp"

namespace causalmk {

enum class QueryKind { sat, eval, cause, causes, part, possibility, certainty, modalcause, suffcause, axioms };

inline const std::vector<std::pair<std::string, QueryKind>>& query_kinds() {
  static const std::vector<std::pair<std::string, QueryKind>> kinds{
      {"sat", QueryKind::sat},
      {"eval", QueryKind::eval},
      {"cause", QueryKind::cause},
      {"causes", QueryKind::causes},
      {"part", QueryKind::part},
      {"possibility", QueryKind::possibility},
      {"certainty", QueryKind::certainty},
      {"modalcause", QueryKind::modalcause},
      {"suffcause", QueryKind::suffcause},
      {"axioms", QueryKind::axioms},
  };
  return kinds;
}

inline std::string to_string(QueryKind k) {
  for (const auto& [name, kind] : query_kinds())
    if (kind == k) return name;
  return "?";
}

inline std::optional<QueryKind> parse_query_kind(std::string_view s) {
  for (const auto& [name, kind] : query_kinds())
    if (name == s) return kind;
  return std::nullopt;
}

// Raised for malformed query options (usage errors).
class QueryError : public Error {
 public:
  using Error::Error;
};

struct QuerySpec {
  QueryKind kind = QueryKind::sat;
  std::string context;
  std::string world;
  std::string formula;    // sat
  std::string event;      // every cause-related kind
  std::string candidate;  // cause, modalcause, suffcause; the atom for part
  std::string variable;   // possibility, certainty
  Value value = 1;
  std::vector<Definition> definitions{Definition::original};
  Modality modality = Modality::dia;
  std::optional<std::size_t> max_conjuncts;  // causes, part; default: every size
  bool include_trivial = false;
  Scope scope = Scope::global;
  std::string nearby = "all";  // all | none | hamming:K
  bool reflexive = true;
  SearchOptions search;
  std::uint64_t seed = 1;
  std::size_t models = 100;
  std::size_t samples = 20;
};

namespace detail {

inline std::size_t parse_count(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    unsigned long long n = std::stoull(v, &used);
    if (used == v.size()) return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
  }
  throw QueryError("option " + key + " expects a non-negative integer, found '" + v + "'");
}

inline bool parse_flag(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw QueryError("option " + key + " expects true or false, found '" + v + "'");
}

}  // namespace detail

inline std::vector<Definition> parse_definitions(const std::string& v) {
  if (v == "all") return {kAllDefinitions[0], kAllDefinitions[1], kAllDefinitions[2]};
  std::vector<Definition> out;
  std::stringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto d = parse_definition(item);
    if (!d) throw QueryError("unknown definition '" + item + "' (original, updated, modified or all)");
    out.push_back(*d);
  }
  if (out.empty()) throw QueryError("empty definition list");
  return out;
}

// Applies one key=value option; unknown keys are rejected.
inline void set_query_option(QuerySpec& q, const std::string& key, const std::string& v) {
  if (key == "context") q.context = v;
  else if (key == "world") q.world = v;
  else if (key == "formula") q.formula = v;
  else if (key == "event") q.event = v;
  else if (key == "candidate" || key == "atom") q.candidate = v;
  else if (key == "variable") q.variable = v;
  else if (key == "value") {
    try {
      std::size_t used = 0;
      q.value = std::stoi(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
    } catch (const std::exception&) {
      throw QueryError("option value expects an integer, found '" + v + "'");
    }
  } else if (key == "def") q.definitions = parse_definitions(v);
  else if (key == "modality") {
    if (v == "box") q.modality = Modality::box;
    else if (v == "dia") q.modality = Modality::dia;
    else throw QueryError("modality must be box or dia");
  } else if (key == "max") q.max_conjuncts = detail::parse_count(key, v);
  else if (key == "trivial") q.include_trivial = detail::parse_flag(key, v);
  else if (key == "scope") {
    if (v == "global") q.scope = Scope::global;
    else if (v == "local") q.scope = Scope::local;
    else throw QueryError("scope must be global or local");
  } else if (key == "nearby") q.nearby = v;
  else if (key == "reflexive") q.reflexive = detail::parse_flag(key, v);
  else if (key == "budget") q.search.max_evaluations = detail::parse_count(key, v);
  else if (key == "max_contingency") q.search.max_contingency = detail::parse_count(key, v);
  else if (key == "seed") q.seed = detail::parse_count(key, v);
  else if (key == "models") q.models = detail::parse_count(key, v);
  else if (key == "samples") q.samples = detail::parse_count(key, v);
  else throw QueryError("unknown query option '" + key + "'");
}

// The options of a query line other than expect=.
inline QuerySpec spec_from_line(const QueryLine& line) {
  QuerySpec q;
  auto kind = parse_query_kind(line.kind);
  if (!kind) throw ModelFileError("unknown query kind '" + line.kind + "'", line.line);
  q.kind = *kind;
  for (const auto& [k, v] : line.options) {
    if (k == "expect") continue;
    try {
      set_query_option(q, k, v);
    } catch (const QueryError& e) {
      throw ModelFileError(e.what(), line.line);
    }
  }
  return q;
}

struct QueryResult {
  QueryKind kind = QueryKind::sat;
  std::optional<bool> truth;
  std::vector<std::pair<Definition, CauseVerdict>> verdicts;
  std::vector<std::pair<Definition, std::vector<Conjunction>>> causes;
  std::vector<std::pair<Definition, bool>> per_definition;  // part, modalcause
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, Value>>>> valuation;  // eval
  std::optional<SufficiencyVerdict> sufficiency;
  std::optional<AxiomReport> axioms;
  std::string answer;  // compact form compared against expect=
  std::vector<std::string> notes;
};

namespace detail {

inline void require(bool ok, const std::string& what, QueryKind k) {
  if (!ok) throw QueryError(to_string(k) + " query needs " + what);
}

// One answer when every definition agrees, else "def: answer" per definition.
template <class T, class F>
std::string joined_answer(const std::vector<std::pair<Definition, T>>& items, F text) {
  std::vector<std::string> parts;
  for (const auto& [d, x] : items) parts.push_back(text(x));
  if (std::all_of(parts.begin(), parts.end(), [&](const std::string& p) { return p == parts.front(); }))
    return parts.empty() ? std::string() : parts.front();
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += " | ";
    out += to_string(items[i].first) + ": " + parts[i];
  }
  return out;
}

inline std::string causes_text(const std::vector<Conjunction>& causes) {
  std::string out;
  for (std::size_t i = 0; i < causes.size(); ++i) {
    if (i) out += "; ";
    out += print_conjunction(causes[i]);
  }
  return out.empty() ? "none" : out;
}

inline std::string bool_text(bool b) { return b ? "true" : "false"; }

inline std::vector<std::pair<std::size_t, std::size_t>> nearby_relation(const std::string& spec,
                                                                        const std::vector<Context>& contexts) {
  if (spec == "all") {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t a = 0; a < contexts.size(); ++a)
      for (std::size_t b = 0; b < contexts.size(); ++b) out.emplace_back(a, b);
    return out;
  }
  if (spec == "none") return {};
  if (spec.rfind("hamming:", 0) == 0) return hamming_nearby(contexts, parse_count("nearby", spec.substr(8)));
  throw QueryError("nearby must be all, none or hamming:K");
}

}  // namespace detail

inline QueryResult run_query(const ModelFile& file, const QuerySpec& q) {
  QueryResult r;
  r.kind = q.kind;
  if (q.kind == QueryKind::axioms) {
    ModelGenSpec gen;
    gen.seed = q.seed;
    r.axioms = run_axiom_suite(gen, q.models, q.samples);
    bool mutation_caught = r.axioms->failures.count(Scheme::LocalG) && r.axioms->failures.at(Scheme::LocalG) > 0;
    r.answer = r.axioms->sound() && mutation_caught ? "pass" : "fail";
    return r;
  }

  detail::require(!q.context.empty() || file.contexts.size() == 1, "a context", q.kind);
  std::string ctx_name = q.context.empty() ? file.contexts.front().first : q.context;
  Setting s = file.setting(ctx_name);
  const Model& m = s.model();
  std::string world = q.world;
  if (world.empty() && m.world_count() == 1) world = m.worlds().front();

  auto event = [&] {
    detail::require(!q.event.empty(), "an event", q.kind);
    return parse_event(q.event);
  };
  auto candidate = [&] {
    detail::require(!q.candidate.empty(), "a candidate", q.kind);
    return parse_conjunction(q.candidate);
  };
  auto need_world = [&] {
    detail::require(!world.empty(), "a world", q.kind);
    m.world_index(world);
  };

  switch (q.kind) {
    case QueryKind::sat: {
      need_world();
      detail::require(!q.formula.empty(), "a formula", q.kind);
      r.truth = satisfies(s, world, parse(q.formula));
      r.answer = detail::bool_text(*r.truth);
      break;
    }
    case QueryKind::eval: {
      std::vector<std::size_t> worlds;
      if (q.world.empty()) {
        for (std::size_t w = 0; w < m.world_count(); ++w) worlds.push_back(w);
      } else {
        worlds.push_back(m.world_index(q.world));
      }
      std::vector<std::string> parts;
      for (std::size_t w : worlds) {
        std::vector<std::pair<std::string, Value>> vals;
        std::string truths;
        for (const auto& v : m.signature().endogenous()) {
          Value x = s.valuation()[m.node(m.variable_index(v), w)];
          vals.emplace_back(v, x);
          if (x == 1) truths += (truths.empty() ? "" : ",") + v;
        }
        r.valuation.emplace_back(m.worlds()[w], vals);
        parts.push_back((q.world.empty() ? m.worlds()[w] + "=" : std::string()) + "{" + truths + "}");
      }
      for (std::size_t i = 0; i < parts.size(); ++i) r.answer += (i ? " " : "") + parts[i];
      break;
    }
    case QueryKind::cause: {
      need_world();
      Formula e = event();
      Conjunction c = candidate();
      CauseQuery cq(s, world, e, q.search);
      for (Definition d : q.definitions) r.verdicts.emplace_back(d, cq.is_cause(c, d));
      r.answer = detail::joined_answer(r.verdicts, [](const CauseVerdict& v) { return to_string(v.outcome); });
      break;
    }
    case QueryKind::causes: {
      need_world();
      CauseQuery cq(s, world, event(), q.search);
      std::size_t max = q.max_conjuncts.value_or(std::max<std::size_t>(1, cq.universe().size()));
      for (Definition d : q.definitions) r.causes.emplace_back(d, cq.find_causes(d, max, q.include_trivial));
      r.answer = detail::joined_answer(r.causes, detail::causes_text);
      if (!q.max_conjuncts) r.notes.push_back("complete: every candidate size was searched");
      else r.notes.push_back("complete up to " + std::to_string(max) + " conjuncts");
      if (!q.include_trivial) r.notes.push_back("pairs the event reads directly are not offered as candidates");
      break;
    }
    case QueryKind::part: {
      need_world();
      Conjunction atom = candidate();
      if (atom.size() != 1) throw QueryError("part query needs a single atom X@w=x");
      CauseQuery cq(s, world, event(), q.search);
      for (Definition d : q.definitions) r.per_definition.emplace_back(d, cq.part_of_cause(atom[0], d, q.max_conjuncts));
      r.answer = detail::joined_answer(r.per_definition, detail::bool_text);
      r.notes.push_back(q.max_conjuncts ? "searched causes up to " + std::to_string(*q.max_conjuncts) + " conjuncts"
                                        : "searched causes of every size");
      break;
    }
    case QueryKind::possibility:
    case QueryKind::certainty: {
      need_world();
      detail::require(!q.variable.empty(), "a variable", q.kind);
      Formula e = event();
      r.truth = q.kind == QueryKind::possibility ? possibility_is_cause(s, world, q.variable, q.value, e, q.search)
                                                 : certainty_is_cause(s, world, q.variable, q.value, e, q.search);
      if (q.kind == QueryKind::possibility) {
        Conjunction c = possibility_conjunction(s, world, q.variable, q.value);
        r.notes.push_back("conjunction: " + (c.empty() ? std::string("empty") : print_conjunction(c)));
      }
      if (m.successors(m.world_index(world)).empty()) r.notes.push_back(world + " has no successors");
      r.answer = detail::bool_text(*r.truth);
      break;
    }
    case QueryKind::modalcause: {
      need_world();
      Formula e = event();
      Conjunction c = candidate();
      for (Definition d : q.definitions)
        r.per_definition.emplace_back(d, modal_cause_check(s, world, q.modality, c, e, d, q.search));
      r.answer = detail::joined_answer(r.per_definition, detail::bool_text);
      break;
    }
    case QueryKind::suffcause: {
      need_world();
      if (m.world_count() != 1) throw QueryError("suffcause needs a single-world model");
      std::vector<Context> contexts = all_contexts(m);
      ContextSpace space(file.model, contexts, detail::nearby_relation(q.nearby, contexts), q.reflexive);
      std::size_t u = space.index_of(s.context());
      Definition d = q.definitions.size() == 1 ? q.definitions.front() : Definition::updated;
      r.sufficiency = is_sufficient_cause(space, u, candidate(), event(), q.scope, d, q.search);
      r.answer = r.sufficiency->holds ? "holds" : "fails";
      break;
    }
    case QueryKind::axioms:
      break;
  }
  return r;
}

// True when the answer matches the expectation. Cause lists compare as sets
// of conjunctions separated by ';'.
inline bool answer_matches(const QueryResult& r, const std::string& expect) {
  if (r.kind != QueryKind::causes || r.answer.find(" | ") != std::string::npos) return r.answer == expect;
  auto split = [](const std::string& s) {
    std::set<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ';')) {
      std::string t = detail::trim(item);
      if (!t.empty() && t != "none") out.insert(print_conjunction(parse_conjunction(t)));
    }
    return out;
  };
  return split(r.answer) == split(expect);
}

struct GoldenOutcome {
  std::string file;
  std::string query;
  std::string expect;
  std::string answer;
  bool passed = false;
  std::string error;
};

// Runs every query with an expect= option in the file.
inline std::vector<GoldenOutcome> check_golden(const std::filesystem::path& path) {
  std::vector<GoldenOutcome> out;
  ModelFile file = load_model_file(path);
  for (const auto& line : file.queries) {
    auto expect = line.get("expect");
    if (!expect) continue;
    GoldenOutcome g;
    g.file = path.filename().string();
    g.query = line.name;
    g.expect = *expect;
    try {
      QueryResult r = run_query(file, spec_from_line(line));
      g.answer = r.answer;
      g.passed = answer_matches(r, *expect);
    } catch (const Error& e) {
      g.error = e.what();
    }
    out.push_back(std::move(g));
  }
  return out;
}

// Model files (*.ck) in a directory, sorted by name.
inline std::vector<std::filesystem::path> corpus_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".ck") out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace causalmk
