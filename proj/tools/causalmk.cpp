// Command line front end.
//
// Exit codes: 0 query answered, 1 usage or parse error, 2 model error,
// 3 search budget exceeded.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "causalmk/causalmk.hpp"

#ifndef CAUSALMK_CORPUS_DIR
#define CAUSALMK_CORPUS_DIR "corpus"
#endif

using namespace causalmk;
using nlohmann::ordered_json;

namespace {

enum ExitCode { kAnswered = 0, kUsage = 1, kModel = 2, kBudget = 3 };

struct Flags {
  bool json = false;
  std::optional<std::uint64_t> budget;
  std::optional<std::uint64_t> seed;
};

// Raw option text collected by CLI11, turned into a QuerySpec afterwards.
struct Options {
  std::string file;
  std::vector<std::pair<std::string, std::string>> set;
  std::map<std::string, std::string> values;
};

ordered_json assignments_json(const std::vector<Assignment>& as) {
  ordered_json out = ordered_json::array();
  for (const auto& a : as) out.push_back(to_string(a));
  return out;
}

ordered_json verdict_json(Definition d, const CauseVerdict& v) {
  ordered_json j;
  j["definition"] = to_string(d);
  j["outcome"] = to_string(v.outcome);
  j["clauses"] = {{"AC1", to_string(v.ac1)}, {"AC2", to_string(v.ac2)}, {"AC3", to_string(v.ac3)}};
  if (v.witness) {
    j["witness"] = {{"contingency", assignments_json(v.witness->contingency)},
                    {"alternative", assignments_json(v.witness->alternative)},
                    {"fixed", assignments_json(v.witness->fixed)}};
  }
  if (v.smaller_cause) j["smaller_cause"] = print_conjunction(*v.smaller_cause);
  if (!v.reason.empty()) j["reason"] = v.reason;
  j["stats"] = {{"evaluations", v.stats.evaluations},
                {"relevant_pairs", v.stats.universe},
                {"contingency_limit", v.stats.contingency_limit}};
  return j;
}

ordered_json result_json(const std::string& file, const QuerySpec& q, const QueryResult& r) {
  ordered_json j;
  j["query"] = to_string(r.kind);
  if (!file.empty()) j["model"] = file;
  if (!q.context.empty()) j["context"] = q.context;
  if (!q.world.empty()) j["world"] = q.world;
  j["answer"] = r.answer;
  if (r.truth) j["truth"] = *r.truth;
  if (!r.verdicts.empty()) {
    j["verdicts"] = ordered_json::array();
    for (const auto& [d, v] : r.verdicts) j["verdicts"].push_back(verdict_json(d, v));
  }
  if (!r.causes.empty()) {
    j["causes"] = ordered_json::array();
    for (const auto& [d, cs] : r.causes) {
      ordered_json list = ordered_json::array();
      for (const auto& c : cs) list.push_back(assignments_json(c));
      j["causes"].push_back({{"definition", to_string(d)}, {"causes", list}});
    }
  }
  if (!r.per_definition.empty()) {
    j["per_definition"] = ordered_json::object();
    for (const auto& [d, b] : r.per_definition) j["per_definition"][to_string(d)] = b;
  }
  if (!r.valuation.empty()) {
    j["valuation"] = ordered_json::object();
    for (const auto& [w, vals] : r.valuation) {
      ordered_json vj = ordered_json::object();
      for (const auto& [v, x] : vals) vj[v] = x;
      j["valuation"][w] = vj;
    }
  }
  if (r.sufficiency) {
    const auto& s = *r.sufficiency;
    ordered_json sj = {{"holds", s.holds}, {"scope", to_string(s.scope)}, {"definition", to_string(s.definition)},
                       {"SC1", s.sc1},     {"SC2", s.sc2},                 {"SC3", s.sc3},
                       {"minimal", s.minimal}};
    if (s.sc2_conjunct) sj["sc2_conjunct"] = to_string(*s.sc2_conjunct);
    if (s.sc3_counterexample) sj["sc3_counterexample_context"] = *s.sc3_counterexample;
    if (s.smaller) sj["smaller"] = print_conjunction(*s.smaller);
    if (!s.reason.empty()) sj["reason"] = s.reason;
    j["sufficiency"] = sj;
  }
  if (r.axioms) {
    const auto& a = *r.axioms;
    ordered_json aj;
    aj["models"] = a.models;
    aj["necessitation_premises_valid"] = a.necessitation_exercised;
    for (const auto& [s, n] : a.instances) {
      std::size_t f = a.failures.count(s) ? a.failures.at(s) : 0;
      aj["schemes"][to_string(s)] = {{"instances", n}, {"counterexamples", f}};
    }
    if (a.first_failure)
      aj["first_counterexample"] = {{"scheme", to_string(a.first_failure->scheme)},
                                    {"world", a.first_failure->world},
                                    {"instance", print(a.first_failure->instance)}};
    j["axioms"] = aj;
  }
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

void print_human(const QueryResult& r) {
  std::cout << to_string(r.kind) << ": " << r.answer << "\n";
  for (const auto& [d, v] : r.verdicts) {
    std::cout << "  [" << to_string(d) << "] " << to_string(v.outcome) << "  AC1=" << to_string(v.ac1)
              << " AC2=" << to_string(v.ac2) << " AC3=" << to_string(v.ac3) << "\n";
    if (v.witness) {
      auto list = [](const std::vector<Assignment>& as) {
        std::string out;
        for (const auto& a : as) out += (out.empty() ? "" : ", ") + to_string(a);
        return "{" + out + "}";
      };
      std::cout << "      witness: N=" << list(v.witness->contingency) << " y'=" << list(v.witness->alternative)
                << "\n";
    }
    if (!v.reason.empty()) std::cout << "      " << v.reason << "\n";
  }
  for (const auto& [d, cs] : r.causes) {
    std::cout << "  [" << to_string(d) << "] " << cs.size() << " cause(s)\n";
    for (const auto& c : cs) std::cout << "      " << print_conjunction(c) << "\n";
  }
  for (const auto& [d, b] : r.per_definition) std::cout << "  [" << to_string(d) << "] " << (b ? "true" : "false") << "\n";
  for (const auto& [w, vals] : r.valuation) {
    std::cout << "  " << w << ":";
    for (const auto& [v, x] : vals) std::cout << " " << v << "=" << x;
    std::cout << "\n";
  }
  if (r.sufficiency) {
    const auto& s = *r.sufficiency;
    std::cout << "  SC1=" << s.sc1 << " SC2=" << s.sc2 << " SC3(" << to_string(s.scope) << ")=" << s.sc3
              << " minimal=" << s.minimal << "\n";
    if (!s.reason.empty()) std::cout << "  " << s.reason << "\n";
  }
  if (r.axioms) {
    for (const auto& [s, n] : r.axioms->instances) {
      std::size_t f = r.axioms->failures.count(s) ? r.axioms->failures.at(s) : 0;
      std::cout << "  " << to_string(s) << ": " << n << " instances, " << f << " counterexamples"
                << (s == Scheme::LocalG ? " (mutation, expected > 0)" : "") << "\n";
    }
    if (r.axioms->first_failure)
      std::cout << "  first counterexample: " << print(r.axioms->first_failure->instance) << " at "
                << r.axioms->first_failure->world << "\n";
  }
  for (const auto& n : r.notes) std::cout << "  note: " << n << "\n";
}

int run_spec(const std::string& file, QuerySpec q, const Flags& flags) {
  if (flags.budget) q.search.max_evaluations = *flags.budget;
  if (flags.seed) q.seed = *flags.seed;
  ModelFile mf;
  if (q.kind != QueryKind::axioms) mf = load_model_file(file);
  QueryResult r = run_query(mf, q);
  if (flags.json) std::cout << result_json(file, q, r).dump(2) << "\n";
  else print_human(r);
  for (const auto& [d, v] : r.verdicts)
    if (v.inconclusive()) return kBudget;
  return kAnswered;
}

int run_corpus(const std::string& dir, bool check, const Flags& flags) {
  auto files = corpus_files(dir);
  ordered_json j = ordered_json::array();
  bool all_pass = true;
  for (const auto& f : files) {
    if (!check) {
      ModelFile mf = load_model_file(f);
      if (flags.json) {
        j.push_back({{"file", f.filename().string()},
                     {"worlds", mf.model->world_count()},
                     {"contexts", mf.contexts.size()},
                     {"queries", mf.queries.size()}});
      } else {
        std::cout << f.filename().string() << "  worlds=" << mf.model->world_count()
                  << " contexts=" << mf.contexts.size() << " queries=" << mf.queries.size() << "\n";
      }
      continue;
    }
    for (const auto& g : check_golden(f)) {
      all_pass = all_pass && g.passed;
      if (flags.json) {
        ordered_json e = {{"file", g.file}, {"query", g.query}, {"passed", g.passed}, {"expect", g.expect},
                          {"answer", g.answer}};
        if (!g.error.empty()) e["error"] = g.error;
        j.push_back(e);
      } else {
        std::cout << (g.passed ? "PASS " : "FAIL ") << g.file << " " << g.query;
        if (!g.passed) std::cout << "  expected [" << g.expect << "] got [" << (g.error.empty() ? g.answer : g.error) << "]";
        std::cout << "\n";
      }
    }
  }
  if (flags.json) std::cout << j.dump(2) << "\n";
  return check && !all_pass ? kUsage : kAnswered;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Actual causality in causal Kripke models"};
  app.require_subcommand(1);
  Flags flags;
  std::uint64_t budget = 0, seed = 0;
  app.add_flag("--json", flags.json, "Machine-readable output");
  auto* budget_opt = app.add_option("--budget", budget, "Maximum event evaluations per query");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for randomized checks");

  struct Sub {
    QueryKind kind;
    const char* help;
    std::vector<std::pair<const char*, const char*>> options;  // CLI name, query key
  };
  const std::vector<Sub> subs{
      {QueryKind::sat, "Satisfaction of a formula at a world", {{"--formula", "formula"}}},
      {QueryKind::eval, "Valuation of the endogenous variables", {}},
      {QueryKind::cause,
       "Decide whether a conjunction is an actual cause",
       {{"--candidate", "candidate"}, {"--event", "event"}, {"--def", "def"}}},
      {QueryKind::causes,
       "Enumerate actual causes",
       {{"--event", "event"}, {"--def", "def"}, {"--max", "max"}, {"--trivial", "trivial"}}},
      {QueryKind::part,
       "Whether an atom is part of some cause",
       {{"--atom", "atom"}, {"--event", "event"}, {"--def", "def"}, {"--max", "max"}}},
      {QueryKind::possibility,
       "Whether the possibility of X=x is a cause",
       {{"--variable", "variable"}, {"--value", "value"}, {"--event", "event"}}},
      {QueryKind::certainty,
       "Whether the certainty of X=x is a cause",
       {{"--variable", "variable"}, {"--value", "value"}, {"--event", "event"}}},
      {QueryKind::modalcause,
       "Cause at some (dia) or every (box) successor",
       {{"--modality", "modality"}, {"--candidate", "candidate"}, {"--event", "event"}, {"--def", "def"}}},
      {QueryKind::suffcause,
       "Sufficient cause over the contexts of a single-world model",
       {{"--candidate", "candidate"},
        {"--event", "event"},
        {"--def", "def"},
        {"--scope", "scope"},
        {"--nearby", "nearby"},
        {"--reflexive", "reflexive"}}},
  };

  std::vector<std::pair<CLI::App*, Options>> parsed;
  parsed.reserve(subs.size() + 1);
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(to_string(s.kind), s.help);
    sub->fallthrough();
    parsed.emplace_back(sub, Options{});
    Options& o = parsed.back().second;
    sub->add_option("model", o.file, "Model file (.ck)")->required()->check(CLI::ExistingFile);
    sub->add_option("--context", o.values["context"], "Context name (optional when the file has one)");
    sub->add_option("--world", o.values["world"], "Evaluation world");
    sub->add_option("--max-contingency", o.values["max_contingency"], "Cap on the contingency set size");
    for (const auto& [flag, key] : s.options) {
      if (std::string(key) == "trivial")
        sub->add_flag_callback(flag, [&o] { o.values["trivial"] = "true"; }, "Include candidates the event reads directly");
      else
        sub->add_option(flag, o.values[key]);
    }
  }

  CLI::App* axioms = app.add_subcommand("axioms", "Check the axiom schemes on random models");
  axioms->fallthrough();
  std::size_t models = 100, samples = 20;
  axioms->add_option("--models", models, "Number of generated models");
  axioms->add_option("--samples", samples, "Instances per scheme and model");

  CLI::App* corpus = app.add_subcommand("corpus", "List bundled models or check their golden queries");
  corpus->fallthrough();
  std::string dir = CAUSALMK_CORPUS_DIR;
  bool check = false;
  corpus->add_option("--dir", dir, "Corpus directory");
  corpus->add_flag("--check", check, "Run every golden query");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kAnswered : kUsage;
  }
  if (budget_opt->count()) flags.budget = budget;
  if (seed_opt->count()) flags.seed = seed;

  try {
    if (corpus->parsed()) return run_corpus(dir, check, flags);
    if (axioms->parsed()) {
      QuerySpec q;
      q.kind = QueryKind::axioms;
      q.models = models;
      q.samples = samples;
      return run_spec("", q, flags);
    }
    for (std::size_t i = 0; i < subs.size(); ++i) {
      auto& [sub, o] = parsed[i];
      if (!sub->parsed()) continue;
      QuerySpec q;
      q.kind = subs[i].kind;
      for (const auto& [key, value] : o.values)
        if (!value.empty()) set_query_option(q, key, value);
      return run_spec(o.file, q, flags);
    }
  } catch (const SearchBudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const ModelFileError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const SyntaxError& e) {
    std::cerr << "syntax error: " << e.what() << "\n";
    return kUsage;
  } catch (const NestedInterventionError& e) {
    std::cerr << "syntax error: " << e.what() << "\n";
    return kUsage;
  } catch (const QueryError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kModel;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
