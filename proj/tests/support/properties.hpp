#pragma once

// Property suites shared by the unit tests and the acceptance binary. Each
// returns counts plus the first offending case so callers can report it.

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "causalmk/axioms.hpp"
#include "causalmk/cause.hpp"
#include "causalmk/sufficiency.hpp"
#include "support/classical_oracle.hpp"
#include "support/oracle_bridge.hpp"

namespace properties {

using namespace causalmk;

inline oracle::Def to_oracle(Definition d) {
  switch (d) {
    case Definition::original: return oracle::Def::original;
    case Definition::updated: return oracle::Def::updated;
    case Definition::modified: return oracle::Def::modified;
  }
  return oracle::Def::original;
}

// Every conjunction of one or two literals over distinct variables.
inline std::vector<std::vector<oracle::Literal>> small_candidates(int vars) {
  std::vector<std::vector<oracle::Literal>> out;
  for (int a = 0; a < vars; ++a)
    for (int x = 0; x < 2; ++x) {
      out.push_back({{a, x}});
      for (int b = a + 1; b < vars; ++b)
        for (int y = 0; y < 2; ++y) out.push_back({{a, x}, {b, y}});
    }
  return out;
}

struct OracleReport {
  std::size_t models = 0;
  std::size_t checks = 0;
  std::size_t causes = 0;  // checks where the oracle reported a cause
  std::size_t disagreements = 0;
  std::string first;
};

// Random single-world models with an empty relation; every candidate of size
// at most two, under all three definitions.
inline OracleReport oracle_agreement(std::size_t models, std::uint64_t seed) {
  OracleReport r;
  std::mt19937_64 rng(seed);
  while (r.models < models) {
    int endo = 2 + static_cast<int>(rng() % 3);
    int exo = 1 + static_cast<int>(rng() % 2);
    oracle::Sem sem = oracle::random_sem(rng, endo, exo);
    oracle::ExprPtr event = oracle::random_expr(rng, endo, 3);
    oracle::Checker check(sem, event);
    if (!oracle::eval(*event, check.actual())) continue;  // no cause of an event that does not hold
    ++r.models;
    Setting s = oracle::to_setting(sem);
    Formula f = parse_event(oracle::to_text(*event));
    CauseQuery q(s, "w", f);
    for (const auto& cand : small_candidates(endo))
      for (Definition d : kAllDefinitions) {
        ++r.checks;
        bool want = check.is_cause(cand, to_oracle(d));
        bool got = q.is_cause(oracle::to_conjunction(cand), d).holds();
        r.causes += want;
        if (want != got && r.disagreements++ == 0) {
          std::ostringstream os;
          os << "event " << oracle::to_text(*event) << ", candidate " << print_conjunction(oracle::to_conjunction(cand))
             << ", " << to_string(d) << ": oracle " << want << " engine " << got;
          r.first = os.str();
        }
      }
  }
  return r;
}

struct ImplicationReport {
  std::size_t models = 0;
  std::size_t atoms = 0;           // (world, atom) pairs examined
  std::size_t parts[3] = {0, 0, 0};  // part-of-cause hits per definition
  std::size_t violations = 0;
  std::string first;
};

// Part-of-cause implications modified => original, modified => updated and
// updated => original, on random Kripke models with exhaustive search.
inline ImplicationReport part_of_cause_implications(std::size_t models, std::uint64_t seed) {
  ImplicationReport r;
  ModelGenSpec spec;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < models; ++i) {
    spec.seed = seed * 1000003 + i;
    GeneratedModel g = generate_model(spec);
    Setting s = g.setting();
    const Model& m = *g.model;
    Formula event = detail::random_event(rng, detail::shape_of(m), rng() % 4);
    ++r.models;
    for (std::size_t w = 0; w < m.world_count(); ++w) {
      CauseQuery q(s, w, event);
      std::size_t max = std::max<std::size_t>(1, q.universe().size());
      for (NodeId n : m.endogenous_nodes()) {
        Assignment atom{m.pair(n), s.valuation()[n]};
        bool part[3];
        for (Definition d : kAllDefinitions) {
          part[static_cast<int>(d)] = q.part_of_cause(atom, d, max);
          r.parts[static_cast<int>(d)] += part[static_cast<int>(d)];
        }
        ++r.atoms;
        bool o = part[0], u = part[1], mo = part[2];
        const char* broken = nullptr;
        if (mo && !o) broken = "modified => original";
        else if (mo && !u) broken = "modified => updated";
        else if (u && !o) broken = "updated => original";
        if (broken && r.violations++ == 0)
          r.first = std::string(broken) + " fails for " + to_string(atom) + " at " + m.worlds()[w] + ", event " +
                    print(event) + ", seed " + std::to_string(spec.seed);
      }
    }
  }
  return r;
}

// Brute-force sufficiency on an oracle model, global scope, updated
// definition for SC2.
struct BruteSufficiency {
  bool sc1 = false, sc2 = false, sc3 = false, minimal = false;
  bool holds() const { return sc1 && sc2 && sc3 && minimal; }
};

inline std::vector<std::vector<int>> all_oracle_contexts(int exogenous) {
  std::vector<std::vector<int>> out;
  for (int bits = 0; bits < (1 << exogenous); ++bits) {
    std::vector<int> c(exogenous);
    for (int k = 0; k < exogenous; ++k) c[k] = bits >> (exogenous - 1 - k) & 1;
    out.push_back(c);
  }
  return out;
}

inline bool brute_part_of_cause(const oracle::Checker& check, int vars, oracle::Literal atom) {
  std::vector<int> others;
  for (int v = 0; v < vars; ++v)
    if (v != atom.var) others.push_back(v);
  for (std::uint32_t mask = 0; mask < (1u << others.size()); ++mask) {
    std::vector<oracle::Literal> x{atom};
    for (std::size_t i = 0; i < others.size(); ++i)
      if (mask >> i & 1) x.push_back({others[i], check.actual()[others[i]]});
    if (check.is_cause(x, oracle::Def::updated)) return true;
  }
  return false;
}

inline BruteSufficiency brute_sufficiency_clauses(const oracle::Sem& sem, const std::vector<int>& context,
                                                  const std::vector<oracle::Literal>& x, const oracle::ExprPtr& event) {
  oracle::Sem here = sem;
  here.context = context;
  oracle::Checker check(here, event);
  BruteSufficiency b;
  b.sc1 = check.ac1(x);
  for (const auto& l : x) b.sc2 = b.sc2 || brute_part_of_cause(check, sem.size(), l);
  b.sc3 = true;
  for (const auto& c : all_oracle_contexts(sem.exogenous)) {
    oracle::Sem other = sem;
    other.context = c;
    std::vector<int> forced(sem.size(), -1);
    for (const auto& l : x) forced[l.var] = l.value;
    b.sc3 = b.sc3 && oracle::eval(*event, other.solve(forced));
  }
  return b;
}

inline BruteSufficiency brute_sufficiency(const oracle::Sem& sem, const std::vector<int>& context,
                                          const std::vector<oracle::Literal>& x, const oracle::ExprPtr& event) {
  BruteSufficiency b = brute_sufficiency_clauses(sem, context, x, event);
  b.minimal = true;
  for (std::uint32_t mask = 1; mask + 1 < (1u << x.size()); ++mask) {
    std::vector<oracle::Literal> sub;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (mask >> i & 1) sub.push_back(x[i]);
    BruteSufficiency s = brute_sufficiency_clauses(sem, context, sub, event);
    if (s.sc1 && s.sc2 && s.sc3) b.minimal = false;
  }
  return b;
}

// Every conjunction over distinct variables with any values.
inline std::vector<std::vector<oracle::Literal>> all_candidates(int vars) {
  std::vector<std::vector<oracle::Literal>> out;
  int total = 1;
  for (int v = 0; v < vars; ++v) total *= 3;
  for (int code = 1; code < total; ++code) {
    std::vector<oracle::Literal> x;
    int c = code;
    for (int v = 0; v < vars; ++v, c /= 3)
      if (c % 3) x.push_back({v, c % 3 - 1});
    out.push_back(x);
  }
  return out;
}

// Lightning (E0) and a dropped match (E1) both needed for a forest fire.
inline oracle::Sem conjunctive_forest() {
  oracle::Sem m;
  m.exogenous = 2;
  m.parents = {{-1}, {-2}, {0, 1}};
  m.tables = {{0, 1}, {0, 1}, {0, 0, 0, 1}};
  m.context = {1, 1};
  return m;
}

inline oracle::ExprPtr atom_event(int var, int value) {
  auto e = std::make_shared<oracle::Expr>();
  e->var = var;
  e->value = value;
  return e;
}

struct SufficiencyReport {
  std::size_t checks = 0;
  std::size_t sufficient = 0;
  std::size_t mismatches = 0;
  std::string first;
};

inline ContextSpace space_of(const Setting& s, std::vector<std::pair<std::size_t, std::size_t>> nearby,
                             bool reflexive) {
  auto base = std::make_shared<const Model>(s.model());
  return ContextSpace(base, all_contexts(*base), std::move(nearby), reflexive);
}

// Global verdicts against brute force, for every context and candidate.
inline SufficiencyReport sufficiency_agreement(const oracle::Sem& sem, const oracle::ExprPtr& event) {
  SufficiencyReport r;
  Setting s = oracle::to_setting(sem);
  ContextSpace space = space_of(s, {}, true);
  Formula f = parse_event(oracle::to_text(*event));
  auto contexts = all_oracle_contexts(sem.exogenous);
  for (std::size_t u = 0; u < contexts.size(); ++u)
    for (const auto& x : all_candidates(sem.size())) {
      ++r.checks;
      BruteSufficiency want = brute_sufficiency(sem, contexts[u], x, event);
      SufficiencyVerdict got = is_sufficient_cause(space, u, oracle::to_conjunction(x), f, Scope::global);
      r.sufficient += want.holds();
      bool same = want.sc1 == got.sc1 && want.holds() == got.holds;
      if (got.sc1) same = same && want.sc2 == got.sc2 && want.sc3 == got.sc3;
      if (!same && r.mismatches++ == 0)
        r.first = "context " + std::to_string(u) + ", candidate " + print_conjunction(oracle::to_conjunction(x));
    }
  return r;
}

struct MonotonicityReport {
  std::size_t relations = 0;
  std::size_t checks = 0;
  std::size_t violations = 0;
  std::string first;
};

// Global SC3 (and SC1-SC3 together) must imply their local counterparts for
// any nearby relation.
inline MonotonicityReport local_monotonicity(const oracle::Sem& sem, const oracle::ExprPtr& event,
                                             std::size_t relations, std::uint64_t seed) {
  MonotonicityReport r;
  std::mt19937_64 rng(seed);
  Setting s = oracle::to_setting(sem);
  Formula f = parse_event(oracle::to_text(*event));
  std::size_t n = std::size_t{1} << sem.exogenous;
  auto candidates = all_candidates(sem.size());
  for (std::size_t i = 0; i < relations; ++i) {
    std::vector<std::pair<std::size_t, std::size_t>> nearby;
    double density = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < density) nearby.emplace_back(a, b);
    bool reflexive = rng() % 2;
    ContextSpace space = space_of(s, nearby, reflexive);
    ++r.relations;
    for (std::size_t u = 0; u < n; ++u)
      for (const auto& x : candidates) {
        ++r.checks;
        Conjunction c = oracle::to_conjunction(x);
        SufficiencyVerdict g = is_sufficient_cause(space, u, c, f, Scope::global);
        SufficiencyVerdict l = is_sufficient_cause(space, u, c, f, Scope::local);
        bool ok = (!g.sc3 || l.sc3) && (!(g.sc1 && g.sc2 && g.sc3) || (l.sc1 && l.sc2 && l.sc3));
        if (!ok && r.violations++ == 0)
          r.first = "relation " + std::to_string(i) + ", context " + std::to_string(u) + ", candidate " +
                    print_conjunction(c);
      }
  }
  return r;
}

}  // namespace properties
