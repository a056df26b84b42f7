#pragma once

/*
 * Sufficient causes over a space of contexts of a single-world model.
 *
 * SC1: the conjunction and the event hold in the context.
 * SC2: some conjunct is part of an actual cause of the event.
 * SC3: forcing the conjunction makes the event true in every context
 *      (global) or in every nearby context (local).
 * The conjunction is minimal: no strict nonempty sub-conjunction meets
 * SC1-SC3 under the same scope.
 *
 * The local scope is decided on the lifted Kripke model, whose worlds are
 * the contexts and whose relation is "nearby", as
 *   (K, t, u) |= box [Y <- y] event
 * where Y is every copy of the conjunction's variables.
 */

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "causalmk/cause.hpp"
#include "causalmk/error.hpp"
#include "causalmk/formula.hpp"
#include "causalmk/model.hpp"
#include "causalmk/semantics.hpp"

namespace causalmk {

enum class Scope { global, local };

inline std::string to_string(Scope s) { return s == Scope::global ? "global" : "local"; }

class ContextSpace {
 public:
  // The base model must have exactly one world. Pairs in `nearby` index
  // into `contexts`; with `reflexive` every context is also nearby itself.
  ContextSpace(std::shared_ptr<const Model> base, std::vector<Context> contexts,
               std::vector<std::pair<std::size_t, std::size_t>> nearby, bool reflexive = true)
      : base_(std::move(base)), contexts_(std::move(contexts)) {
    if (base_->world_count() != 1) throw DeclarationError("a context space needs a single-world base model");
    if (contexts_.empty()) throw DeclarationError("a context space needs at least one context");
    for (std::size_t i = 0; i < contexts_.size(); ++i)
      for (std::size_t j = i + 1; j < contexts_.size(); ++j)
        if (contexts_[i] == contexts_[j])
          throw DeclarationError("contexts " + std::to_string(i) + " and " + std::to_string(j) + " are equal");
    std::vector<std::vector<bool>> rel(contexts_.size(), std::vector<bool>(contexts_.size(), false));
    for (auto [a, b] : nearby) {
      if (a >= contexts_.size() || b >= contexts_.size())
        throw DanglingRefError("nearby pair refers to a context outside the space");
      rel[a][b] = true;
    }
    if (reflexive)
      for (std::size_t i = 0; i < contexts_.size(); ++i) rel[i][i] = true;
    for (std::size_t a = 0; a < contexts_.size(); ++a)
      for (std::size_t b = 0; b < contexts_.size(); ++b)
        if (rel[a][b]) nearby_.emplace_back(a, b);
  }

  const Model& base() const { return *base_; }
  const std::shared_ptr<const Model>& base_ptr() const { return base_; }
  const std::vector<Context>& contexts() const { return contexts_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& nearby() const { return nearby_; }

  bool is_nearby(std::size_t a, std::size_t b) const {
    return std::binary_search(nearby_.begin(), nearby_.end(), std::make_pair(a, b));
  }

  std::size_t index_of(const Context& c) const {
    for (std::size_t i = 0; i < contexts_.size(); ++i)
      if (contexts_[i] == c) return i;
    throw DanglingRefError("context not in the space");
  }

 private:
  std::shared_ptr<const Model> base_;
  std::vector<Context> contexts_;
  std::vector<std::pair<std::size_t, std::size_t>> nearby_;  // sorted
};

// Every context of the model, ordered lexicographically over the exogenous
// pairs in node order.
inline std::vector<Context> all_contexts(const Model& m, std::size_t limit = 1u << 16) {
  std::vector<NodeId> exo;
  for (NodeId n = 0; n < m.node_count(); ++n)
    if (!m.is_endogenous(n)) exo.push_back(n);
  std::uint64_t total = 1;
  for (NodeId n : exo) {
    total *= m.range(n).size();
    if (total > limit) throw SearchBudgetExceeded("more than " + std::to_string(limit) + " contexts");
  }
  std::vector<Context> out;
  std::vector<std::size_t> pos(exo.size(), 0);
  while (true) {
    std::map<PairRef, Value> values;
    for (std::size_t i = 0; i < exo.size(); ++i) values[m.pair(exo[i])] = m.range(exo[i])[pos[i]];
    out.emplace_back(m, values);
    std::size_t i = exo.size();
    while (i > 0) {
      --i;
      if (++pos[i] < m.range(exo[i]).size()) break;
      pos[i] = 0;
      if (i == 0) return out;
    }
    if (exo.empty()) return out;
  }
}

// Pairs of contexts that differ on at most k exogenous pairs (self included).
inline std::vector<std::pair<std::size_t, std::size_t>> hamming_nearby(const std::vector<Context>& contexts,
                                                                       std::size_t k) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t a = 0; a < contexts.size(); ++a)
    for (std::size_t b = 0; b < contexts.size(); ++b) {
      auto x = contexts[a].values(), y = contexts[b].values();
      std::size_t d = 0;
      for (std::size_t i = 0; i < x.size(); ++i) d += x[i] != y[i];
      if (d <= k) out.emplace_back(a, b);
    }
  return out;
}

struct LiftedModel {
  std::shared_ptr<const Model> model;
  Context context;

  Setting setting() const { return Setting(model, context); }
};

// Name of the lifted world for context i.
inline std::string lifted_world(std::size_t i) { return "u" + std::to_string(i); }

namespace detail {

// Rewrites atoms pinned to `from` so they refer to `to`; an empty `to`
// turns them into local atoms.
inline Formula rebase(const Formula& f, const std::string& from, const std::string& to) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
    case Op::LocalAtom:
      return f;
    case Op::GlobalAtom:
      if (f.world() != from) return f;
      return to.empty() ? Formula::local(f.variable(), f.value()) : Formula::global(f.variable(), to, f.value());
    case Op::Not:
      return Formula::negate(rebase(f.lhs(), from, to));
    case Op::And:
      return Formula::conj(rebase(f.lhs(), from, to), rebase(f.rhs(), from, to));
    case Op::Or:
      return Formula::disj(rebase(f.lhs(), from, to), rebase(f.rhs(), from, to));
    case Op::Implies:
      return Formula::implies(rebase(f.lhs(), from, to), rebase(f.rhs(), from, to));
    case Op::Box:
      return Formula::box(rebase(f.lhs(), from, to));
    case Op::Dia:
      return Formula::dia(rebase(f.lhs(), from, to));
    case Op::ConvBox:
      return Formula::conv_box(rebase(f.lhs(), from, to));
    case Op::ConvDia:
      return Formula::conv_dia(rebase(f.lhs(), from, to));
    case Op::Intervene: {
      std::vector<Assignment> as = f.assignments();
      for (auto& a : as)
        if (a.target.world == from && !to.empty()) a.target.world = to;
      return Formula::intervene(std::move(as), rebase(f.body(), from, to));
    }
  }
  return f;
}

}  // namespace detail

// Worlds are the contexts (named u0, u1, ...), the relation is nearby, and
// every world carries a copy of the base equations. The lifted context
// gives each world the exogenous values of its own context.
inline LiftedModel lift_to_kripke(const ContextSpace& space) {
  const Model& base = space.base();
  const std::string& bw = base.worlds()[0];
  std::vector<std::string> worlds;
  for (std::size_t i = 0; i < space.contexts().size(); ++i) worlds.push_back(lifted_world(i));

  Signature sig;
  for (const auto& v : base.signature().exogenous()) sig.add_exogenous(v, base.signature().range(v, bw));
  for (const auto& v : base.signature().endogenous()) sig.add_endogenous(v, base.signature().range(v, bw));

  std::vector<std::pair<std::string, std::string>> relation;
  for (auto [a, b] : space.nearby()) relation.emplace_back(worlds[a], worlds[b]);

  std::map<PairRef, Equation> equations;
  for (const auto& [target, eq] : base.equations())
    for (const auto& w : worlds) {
      if (const auto* t = std::get_if<TableEquation>(&eq)) {
        TableEquation copy = *t;
        for (auto& p : copy.parents) p.world = w;
        equations[{target.variable, w}] = copy;
      } else {
        equations[{target.variable, w}] = FormulaEquation{detail::rebase(std::get<FormulaEquation>(eq).event, bw, "")};
      }
    }

  auto model = std::make_shared<const Model>(build_model(sig, worlds, relation, equations));
  std::map<PairRef, Value> values;
  for (std::size_t i = 0; i < space.contexts().size(); ++i)
    for (NodeId n = 0; n < base.node_count(); ++n)
      if (!base.is_endogenous(n))
        values[{base.variables()[base.variable_of(n)], worlds[i]}] = space.contexts()[i].values()[n];
  return LiftedModel{model, Context(*model, values)};
}

struct SufficiencyVerdict {
  bool holds = false;
  bool sc1 = false;
  bool sc2 = false;
  bool sc3 = false;
  bool minimal = false;
  Scope scope = Scope::global;
  Definition definition = Definition::updated;
  std::optional<Assignment> sc2_conjunct;    // conjunct that is part of a cause
  std::optional<std::size_t> sc3_counterexample;  // context where [X <- x] event fails
  std::optional<Conjunction> smaller;        // strict sub-conjunction meeting SC1-SC3
  std::string reason;
};

namespace detail {

class SufficiencyChecker {
 public:
  SufficiencyChecker(const ContextSpace& space, std::size_t u, const Formula& event, Scope scope, Definition def,
                     SearchOptions options)
      : space_(space), u_(u), event_(event), scope_(scope), def_(def), options_(options) {
    if (u >= space.contexts().size()) throw DanglingRefError("context index outside the space");
    if (!event.is_event()) throw DeclarationError("the effect must be an event (no interventions)");
    world_ = space.base().worlds()[0];
    setting_.emplace(space.base_ptr(), space.contexts()[u]);
    if (scope == Scope::local) lifted_ = lift_to_kripke(space);
  }

  bool sc1(const Conjunction& c) {
    return satisfies(*setting_, world_, event_) &&
           std::all_of(c.begin(), c.end(), [&](const Assignment& a) {
             return setting_->valuation()[space_.base().node(a.target)] == a.value;
           });
  }

  std::optional<Assignment> sc2(const Conjunction& c) {
    if (!query_) query_.emplace(*setting_, world_, event_, options_);
    for (const auto& a : c)
      if (query_->part_of_cause(a, def_)) return a;
    return std::nullopt;
  }

  std::optional<std::size_t> sc3(const Conjunction& c) {
    if (scope_ == Scope::global) {
      Formula f = Formula::intervene(c, event_);
      for (std::size_t i = 0; i < space_.contexts().size(); ++i) {
        Setting s(space_.base_ptr(), space_.contexts()[i]);
        if (!satisfies(s, world_, f)) return i;
      }
      return std::nullopt;
    }
    Setting lifted = lifted_->setting();
    if (satisfies(lifted, lifted_world(u_), Formula::box(lifted_intervention(c)))) return std::nullopt;
    for (auto [a, b] : space_.nearby())
      if (a == u_ && !satisfies(lifted, lifted_world(b), lifted_intervention(c))) return b;
    return u_;
  }

  // [Y <- y] event on the lifted model, with Y every world's copy of the
  // conjunction's variables.
  Formula lifted_intervention(const Conjunction& c) const {
    std::vector<Assignment> as;
    for (std::size_t i = 0; i < space_.contexts().size(); ++i)
      for (const auto& a : c) as.push_back({{a.target.variable, lifted_world(i)}, a.value});
    return Formula::intervene(std::move(as), rebase(event_, world_, ""));
  }

  bool sc123(const Conjunction& c) { return sc1(c) && sc2(c) && !sc3(c); }

  const std::string& world() const { return world_; }

 private:
  const ContextSpace& space_;
  std::size_t u_;
  Formula event_;
  Scope scope_;
  Definition def_;
  SearchOptions options_;
  std::string world_;
  std::optional<Setting> setting_;
  std::optional<LiftedModel> lifted_;
  std::optional<CauseQuery> query_;
};

}  // namespace detail

// Conjunction atoms must name the base model's single world.
inline SufficiencyVerdict is_sufficient_cause(const ContextSpace& space, std::size_t u, const Conjunction& candidate,
                                              const Formula& event, Scope scope,
                                              Definition def = Definition::updated, SearchOptions options = {}) {
  if (candidate.empty()) throw DeclarationError("a candidate cause needs at least one conjunct");
  for (const auto& a : candidate) {
    NodeId n = space.base().node(a.target);
    if (!space.base().is_endogenous(n)) throw DeclarationError(to_string(a.target) + " is exogenous");
  }
  detail::SufficiencyChecker check(space, u, event, scope, def, options);
  SufficiencyVerdict v;
  v.scope = scope;
  v.definition = def;
  v.sc1 = check.sc1(candidate);
  if (!v.sc1) {
    v.reason = "SC1 fails: the conjunction or the event is false in the context";
    return v;
  }
  v.sc2_conjunct = check.sc2(candidate);
  v.sc2 = v.sc2_conjunct.has_value();
  v.sc3_counterexample = check.sc3(candidate);
  v.sc3 = !v.sc3_counterexample;
  if (!v.sc2) v.reason = "SC2 fails: no conjunct is part of a cause";
  else if (!v.sc3)
    v.reason = "SC3 fails: [X <- x] does not force the event in context " + std::to_string(*v.sc3_counterexample);
  if (!v.sc2 || !v.sc3) return v;

  std::size_t k = candidate.size();
  if (k > 20) throw SearchBudgetExceeded("too many conjuncts to check minimality");
  for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << k); ++mask) {
    Conjunction sub;
    for (std::size_t i = 0; i < k; ++i)
      if (mask >> i & 1) sub.push_back(candidate[i]);
    if (check.sc123(sub)) {
      v.smaller = sub;
      v.reason = "not minimal: " + print_conjunction(sub) + " already meets SC1-SC3";
      return v;
    }
  }
  v.minimal = true;
  v.holds = true;
  return v;
}

}  // namespace causalmk
