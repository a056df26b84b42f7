// Acceptance checks: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "causalmk/causalmk.hpp"
#include "support/properties.hpp"

using namespace causalmk;

namespace {

// Time limits, in seconds.
constexpr double kExampleSeconds = 1.0;
constexpr double kImplicationSeconds = 300.0;

// Suite sizes.
constexpr std::size_t kImplicationModels = 500;
constexpr std::size_t kOracleModels = 200;
constexpr std::size_t kAxiomModels = 1000;
constexpr std::size_t kAxiomSamples = 20;
constexpr std::size_t kNearbyRelations = 100;

struct Check {
  bool ok = true;
  std::vector<std::string> notes;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes.push_back(what);
    }
  }
};

ModelFile corpus(const std::string& name) {
  return load_model_file(std::filesystem::path(CAUSALMK_CORPUS_DIR) / name);
}

std::set<std::string> as_set(const std::vector<Conjunction>& causes) {
  std::set<std::string> out;
  for (const auto& c : causes) out.insert(print_conjunction(c));
  return out;
}

std::string join(const std::set<std::string>& s) {
  std::string out;
  for (const auto& x : s) out += (out.empty() ? "" : "; ") + x;
  return "{" + out + "}";
}

void expect_causes(Check& c, const Setting& s, const std::string& world, const std::string& event,
                   std::size_t max, const std::set<std::string>& want, const std::string& label) {
  for (Definition d : kAllDefinitions) {
    auto got = as_set(find_causes(s, world, parse_event(event), d, max));
    c.expect(got == want, label + " " + to_string(d) + ": got " + join(got) + ", want " + join(want));
  }
}

Check criterion1() {
  Check c;
  auto start = std::chrono::steady_clock::now();
  ModelFile f = corpus("umbrella.ck");
  Setting s = f.setting("t");
  Formula q = parse_event("q=1");
  for (const char* cand : {"p@w3=1", "r@w3=1"})
    for (Definition d : kAllDefinitions)
      c.expect(is_cause(s, "w0", parse_conjunction(cand), q, d).holds(), std::string(cand) + " under " + to_string(d));
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(secs < kExampleSeconds, "took " + std::to_string(secs) + " s");
  return c;
}

Check criterion2() {
  Check c;
  Setting s = corpus("stalemate.ck").setting("t");
  expect_causes(c, s, "w0", "r=1", 1, {"p@w0=0", "q@w0=1", "p@w1=1", "p@w2=1"}, "causes");
  c.expect(certainty_is_cause(s, "w0", "p", 1, parse_event("r=1")), "certainty of p=1");
  return c;
}

Check criterion3() {
  Check c;
  ModelFile f = corpus("police.ck");
  expect_causes(c, f.setting("t"), "w0", "s=1", 1, {"p@w1=1", "p@w2=1"}, "context t");
  expect_causes(c, f.setting("t1"), "w0", "s=1", 1, {"o@w0=1", "p@w1=1", "p@w2=1"}, "context t'");
  expect_causes(c, f.setting("t2"), "w0", "s=1", 1, {"o@w0=1"}, "context t''");
  return c;
}

Check criterion4() {
  Check c;
  Setting s = corpus("robot.ck").setting("t");
  Conjunction p = parse_conjunction("p@w0=1");
  Formula r = parse_event("r=1");
  c.expect(is_cause(s, "w2", p, r, Definition::original).holds(), "cause at w2");
  for (Definition d : kAllDefinitions) {
    CauseVerdict at_w1 = is_cause(s, "w1", p, r, d);
    c.expect(!at_w1.holds() && at_w1.ac1 == ClauseStatus::fail, "not a cause at w1 by AC1, " + to_string(d));
    c.expect(is_cause(s, "w2", p, r, d).holds(), "cause at w2, " + to_string(d));
    c.expect(modal_cause_check(s, "w0", Modality::dia, p, r, d), "dia for r=1, " + to_string(d));
    c.expect(modal_cause_check(s, "w0", Modality::dia, p, parse_event("q=1"), d), "dia for q=1, " + to_string(d));
  }
  return c;
}

Check criterion5() {
  Check c;
  Setting s = corpus("navigation.ck").setting("t");
  CauseQuery q(s, "w1", parse_event("r=1"));
  expect_causes(c, s, "w1", "r=1", q.universe().size(), {"q@w1=1", "q@w2=1", "q@w3=1"}, "causes");
  return c;
}

Check criterion6() {
  Check c;
  Setting s = corpus("stalemate-revisited.ck").setting("t");
  Formula r = parse_event("r=1");
  for (const char* cand : {"p1@w1=1", "p2@w1=1"}) {
    Conjunction x = parse_conjunction(cand);
    c.expect(is_cause(s, "w0", x, r, Definition::original).holds(), std::string(cand) + " original");
    c.expect(is_cause(s, "w0", x, r, Definition::updated).holds(), std::string(cand) + " updated");
    c.expect(!is_cause(s, "w0", x, r, Definition::modified).holds(), std::string(cand) + " not modified");
  }
  c.expect(is_cause(s, "w0", parse_conjunction("p1@w1=1 & p2@w1=1"), r, Definition::modified).holds(),
           "pair under modified");
  return c;
}

Check criterion7() {
  Check c;
  auto start = std::chrono::steady_clock::now();
  auto r = properties::part_of_cause_implications(kImplicationModels, 2024);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(r.violations == 0, std::to_string(r.violations) + " violations, first: " + r.first);
  c.expect(secs <= kImplicationSeconds, "took " + std::to_string(secs) + " s");
  c.notes.push_back(std::to_string(r.models) + " models, " + std::to_string(r.atoms) + " atoms, parts o/u/m " +
                    std::to_string(r.parts[0]) + "/" + std::to_string(r.parts[1]) + "/" + std::to_string(r.parts[2]) +
                    ", " + std::to_string(static_cast<int>(secs)) + " s");
  return c;
}

Check criterion8() {
  Check c;
  auto r = properties::oracle_agreement(kOracleModels, 2024);
  c.expect(r.disagreements == 0, std::to_string(r.disagreements) + " disagreements, first: " + r.first);
  c.notes.push_back(std::to_string(r.models) + " models, " + std::to_string(r.checks) + " verdicts, " +
                    std::to_string(r.causes) + " causes");
  return c;
}

Check criterion9() {
  Check c;
  ModelGenSpec spec;
  spec.seed = 2024;
  AxiomReport r = run_axiom_suite(spec, kAxiomModels, kAxiomSamples);
  for (Scheme s : kSoundSchemes) {
    std::size_t f = r.failures.count(s) ? r.failures.at(s) : 0;
    c.expect(f == 0, to_string(s) + ": " + std::to_string(f) + " counterexamples");
    c.expect(r.instances[s] >= kAxiomModels * kAxiomSamples, to_string(s) + ": too few instances");
  }
  std::size_t mutation = r.failures.count(Scheme::LocalG) ? r.failures.at(Scheme::LocalG) : 0;
  c.expect(mutation >= 1, "local-atom variant produced no counterexample");
  c.notes.push_back(std::to_string(r.models) + " models, mutation counterexamples " + std::to_string(mutation));
  return c;
}

Check criterion10() {
  Check c;
  auto a = properties::sufficiency_agreement(properties::conjunctive_forest(), properties::atom_event(2, 1));
  c.expect(a.mismatches == 0, std::to_string(a.mismatches) + " global mismatches, first: " + a.first);
  auto m = properties::local_monotonicity(properties::conjunctive_forest(), properties::atom_event(2, 1),
                                          kNearbyRelations, 2024);
  c.expect(m.relations == kNearbyRelations, "too few relations");
  c.expect(m.violations == 0, std::to_string(m.violations) + " monotonicity violations, first: " + m.first);
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Check()>>> criteria{
      {"umbrella causes under every definition", criterion1},
      {"stalemate causes and certainty", criterion2},
      {"police causes in three contexts", criterion3},
      {"robot causes and modal checks", criterion4},
      {"navigation causes", criterion5},
      {"stalemate-revisited divergence", criterion6},
      {"part-of-cause implications on random models", criterion7},
      {"classical oracle agreement", criterion8},
      {"axiom soundness fuzz and mutation", criterion9},
      {"sufficiency against brute force, global implies local", criterion10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.ok = false;
      c.notes.push_back(std::string("exception: ") + e.what());
    }
    std::printf("%s %2zu  %s\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].first);
    for (const auto& n : c.notes) std::printf("        %s\n", n.c_str());
    std::fflush(stdout);
    failed += !c.ok;
  }
  return failed;
}
