#pragma once

/*
 * Random recursive models and formula instances for checking that the
 * axiom schemes of the modal causal logic hold on concrete models.
 *
 *   K             box(a -> b) -> (box(a) -> box(b))
 *   Necessitation valid(a) implies valid(box(a))
 *   Dia           [Y <- y] dia(e) <-> dia([Y <- y] e)
 *   Box           [Y <- y] box(e) <-> box([Y <- y] e)
 *   G             [Y <- y] X@w=x -> box([Y <- y] X@w=x)
 *
 * LocalG replaces the global atom of G by a local one. It is not valid and
 * serves as a mutation check: a sound suite must find counterexamples.
 */

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "causalmk/formula.hpp"
#include "causalmk/model.hpp"
#include "causalmk/parser.hpp"
#include "causalmk/semantics.hpp"

namespace causalmk {

enum class Scheme { K, Necessitation, Dia, Box, G, LocalG };

inline constexpr Scheme kSoundSchemes[] = {Scheme::K, Scheme::Necessitation, Scheme::Dia, Scheme::Box, Scheme::G};

inline std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::K:
      return "K";
    case Scheme::Necessitation:
      return "Necessitation";
    case Scheme::Dia:
      return "Dia";
    case Scheme::Box:
      return "Box";
    case Scheme::G:
      return "G";
    case Scheme::LocalG:
      return "LocalG";
  }
  return "?";
}

struct ModelGenSpec {
  std::uint64_t seed = 1;
  std::size_t min_worlds = 1;
  std::size_t max_worlds = 3;
  std::size_t min_endogenous = 1;
  std::size_t max_endogenous = 3;
  std::size_t min_exogenous = 1;
  std::size_t max_exogenous = 2;
  double edge_probability = 0.5;
  double table_probability = 0.25;
  std::size_t equation_connectives = 3;  // cap for formula equations
  std::size_t max_table_parents = 2;
};

struct GeneratedModel {
  std::shared_ptr<const Model> model;
  Context context;

  Setting setting() const { return Setting(model, context); }
};

namespace detail {

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool chance(Rng& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

struct Shape {
  std::vector<std::string> worlds;
  std::vector<std::string> variables;  // every variable that may appear in atoms
  std::vector<std::vector<std::size_t>> succ;
  std::vector<std::vector<std::size_t>> pred;
};

// Random event with at most `budget` connectives.
inline Formula random_event(Rng& rng, const Shape& s, std::size_t budget) {
  std::size_t pick = uniform(rng, 0, budget == 0 ? 2 : 10);
  auto var = [&] { return s.variables[uniform(rng, 0, s.variables.size() - 1)]; };
  auto world = [&] { return s.worlds[uniform(rng, 0, s.worlds.size() - 1)]; };
  auto val = [&] { return static_cast<Value>(uniform(rng, 0, 1)); };
  if (pick == 0 || pick == 1) return Formula::local(var(), val());
  if (pick == 2) return Formula::global(var(), world(), val());
  std::size_t rest = budget - 1;
  switch (pick) {
    case 3:
      return Formula::negate(random_event(rng, s, rest));
    case 4:
    case 5: {
      std::size_t left = uniform(rng, 0, rest);
      Formula a = random_event(rng, s, left);
      Formula b = random_event(rng, s, rest - left);
      return pick == 4 ? Formula::conj(a, b) : Formula::disj(a, b);
    }
    case 6: {
      std::size_t left = uniform(rng, 0, rest);
      return Formula::implies(random_event(rng, s, left), random_event(rng, s, rest - left));
    }
    case 7:
      return Formula::box(random_event(rng, s, rest));
    case 8:
      return Formula::dia(random_event(rng, s, rest));
    case 9:
      return Formula::conv_box(random_event(rng, s, rest));
    default:
      return Formula::conv_dia(random_event(rng, s, rest));
  }
}

// Pairs an event evaluated at `world` can read.
inline void event_reads(const Formula& f, const Shape& s, const std::set<std::size_t>& at,
                        const std::map<std::string, std::size_t>& world_index, std::set<PairRef>& out) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
      return;
    case Op::LocalAtom:
      for (std::size_t w : at) out.insert({f.variable(), s.worlds[w]});
      return;
    case Op::GlobalAtom:
      if (!at.empty()) out.insert({f.variable(), f.world()});
      return;
    case Op::Box:
    case Op::Dia:
    case Op::ConvBox:
    case Op::ConvDia: {
      bool forward = f.op() == Op::Box || f.op() == Op::Dia;
      std::set<std::size_t> next;
      for (std::size_t w : at)
        for (std::size_t x : forward ? s.succ[w] : s.pred[w]) next.insert(x);
      event_reads(f.lhs(), s, next, world_index, out);
      return;
    }
    default:
      event_reads(f.lhs(), s, at, world_index, out);
      if (f.is_binary()) event_reads(f.rhs(), s, at, world_index, out);
  }
}

}  // namespace detail

// Deterministic in spec.seed. Equations respect a random order over the
// endogenous pairs, so the model is recursive by construction.
inline GeneratedModel generate_model(const ModelGenSpec& spec) {
  detail::Rng rng(spec.seed);
  std::size_t nw = detail::uniform(rng, spec.min_worlds, spec.max_worlds);
  std::size_t ne = detail::uniform(rng, spec.min_endogenous, spec.max_endogenous);
  std::size_t nx = detail::uniform(rng, spec.min_exogenous, spec.max_exogenous);

  detail::Shape shape;
  for (std::size_t i = 0; i < nw; ++i) shape.worlds.push_back("w" + std::to_string(i));
  Signature sig;
  std::vector<std::string> exo, endo;
  for (std::size_t i = 0; i < nx; ++i) {
    exo.push_back("U" + std::to_string(i));
    sig.add_exogenous(exo.back(), {0, 1});
  }
  for (std::size_t i = 0; i < ne; ++i) {
    endo.push_back(std::string(1, static_cast<char>('p' + i)));
    sig.add_endogenous(endo.back(), {0, 1});
  }
  shape.variables = exo;
  shape.variables.insert(shape.variables.end(), endo.begin(), endo.end());

  std::vector<std::pair<std::string, std::string>> relation;
  shape.succ.assign(nw, {});
  shape.pred.assign(nw, {});
  for (std::size_t a = 0; a < nw; ++a)
    for (std::size_t b = 0; b < nw; ++b)
      if (detail::chance(rng, spec.edge_probability)) {
        relation.emplace_back(shape.worlds[a], shape.worlds[b]);
        shape.succ[a].push_back(b);
        shape.pred[b].push_back(a);
      }
  std::map<std::string, std::size_t> world_index;
  for (std::size_t i = 0; i < nw; ++i) world_index[shape.worlds[i]] = i;

  std::vector<PairRef> order;
  for (const auto& v : endo)
    for (const auto& w : shape.worlds) order.push_back({v, w});
  std::shuffle(order.begin(), order.end(), rng);

  std::set<PairRef> allowed;
  for (const auto& v : exo)
    for (const auto& w : shape.worlds) allowed.insert({v, w});

  std::map<PairRef, Equation> equations;
  for (const auto& target : order) {
    std::optional<Equation> eq;
    if (!detail::chance(rng, spec.table_probability)) {
      for (int attempt = 0; attempt < 8 && !eq; ++attempt) {
        Formula f = detail::random_event(rng, shape, detail::uniform(rng, 0, spec.equation_connectives));
        std::set<PairRef> reads;
        detail::event_reads(f, shape, {world_index[target.world]}, world_index, reads);
        if (std::all_of(reads.begin(), reads.end(), [&](const PairRef& p) { return allowed.count(p) > 0; }))
          eq = FormulaEquation{f};
      }
    }
    if (!eq) {
      std::vector<PairRef> pool(allowed.begin(), allowed.end());
      std::shuffle(pool.begin(), pool.end(), rng);
      std::size_t k = std::min(pool.size(), detail::uniform(rng, 0, spec.max_table_parents));
      TableEquation t;
      t.parents.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << k); ++bits) {
        std::vector<Value> key;
        for (std::size_t i = 0; i < k; ++i) key.push_back(static_cast<Value>(bits >> (k - 1 - i) & 1));
        t.rows[key] = static_cast<Value>(detail::uniform(rng, 0, 1));
      }
      eq = t;
    }
    equations[target] = *eq;
    allowed.insert(target);
  }

  auto model = std::make_shared<const Model>(build_model(sig, shape.worlds, relation, equations));
  std::map<PairRef, Value> values;
  for (const auto& v : exo)
    for (const auto& w : shape.worlds) values[{v, w}] = static_cast<Value>(detail::uniform(rng, 0, 1));
  Context ctx(*model, values);
  return GeneratedModel{model, ctx};
}

struct SchemeInstance {
  Scheme scheme = Scheme::K;
  // The formula checked at every world; for Necessitation the premise.
  Formula formula = Formula::truth();
};

namespace detail {

inline Shape shape_of(const Model& m) {
  Shape s;
  s.worlds = m.worlds();
  s.variables = m.variables();
  s.succ.resize(m.world_count());
  s.pred.resize(m.world_count());
  for (std::size_t w = 0; w < m.world_count(); ++w) {
    s.succ[w] = m.successors(w);
    s.pred[w] = m.predecessors(w);
  }
  return s;
}

// Zero to two endogenous targets with values in range; may be empty.
inline std::vector<Assignment> random_intervention(Rng& rng, const Model& m) {
  const auto& endo = m.endogenous_nodes();
  std::vector<Assignment> out;
  if (endo.empty()) return out;
  std::size_t k = uniform(rng, 0, std::min<std::size_t>(2, endo.size()));
  std::vector<NodeId> pool(endo.begin(), endo.end());
  std::shuffle(pool.begin(), pool.end(), rng);
  for (std::size_t i = 0; i < k; ++i) {
    const Range& r = m.range(pool[i]);
    out.push_back({m.pair(pool[i]), r[uniform(rng, 0, r.size() - 1)]});
  }
  return out;
}

// A causal formula: an event, or an intervention on an event, or a
// connective over such pieces; at most `budget` connectives in total.
inline Formula random_causal(Rng& rng, const Model& m, const Shape& s, std::size_t budget) {
  if (budget >= 1 && chance(rng, 0.4))
    return Formula::intervene(random_intervention(rng, m), random_event(rng, s, budget - 1));
  if (budget >= 2 && chance(rng, 0.3)) {
    std::size_t rest = budget - 1;
    std::size_t left = uniform(rng, 0, rest);
    return Formula::conj(random_causal(rng, m, s, left), random_causal(rng, m, s, rest - left));
  }
  return random_event(rng, s, budget);
}

inline Formula global_atom(Rng& rng, const Model& m) {
  std::size_t v = uniform(rng, 0, m.variable_count() - 1);
  std::size_t w = uniform(rng, 0, m.world_count() - 1);
  const Range& r = m.range(m.node(v, w));
  return Formula::global(m.variables()[v], m.worlds()[w], r[uniform(rng, 0, r.size() - 1)]);
}

}  // namespace detail

// Formula sizes are capped at `max_connectives` per sampled component.
inline std::vector<SchemeInstance> sample_instances(const Model& m, Scheme scheme, std::size_t count,
                                                    std::uint64_t seed, std::size_t max_connectives = 4) {
  detail::Rng rng(seed);
  detail::Shape shape = detail::shape_of(m);
  std::vector<SchemeInstance> out;
  for (std::size_t i = 0; i < count; ++i) {
    auto budget = [&] { return detail::uniform(rng, 0, max_connectives); };
    SchemeInstance inst;
    inst.scheme = scheme;
    switch (scheme) {
      case Scheme::K: {
        Formula a = detail::random_causal(rng, m, shape, budget());
        Formula b = detail::random_causal(rng, m, shape, budget());
        inst.formula = Formula::implies(Formula::box(Formula::implies(a, b)),
                                        Formula::implies(Formula::box(a), Formula::box(b)));
        break;
      }
      case Scheme::Necessitation: {
        // Mix arbitrary formulas with ones that are valid by construction so
        // the closure is actually exercised.
        Formula a = detail::random_causal(rng, m, shape, budget());
        std::size_t kind = detail::uniform(rng, 0, 3);
        if (kind == 0) inst.formula = a;
        else if (kind == 1) inst.formula = Formula::disj(a, Formula::negate(a));
        else if (kind == 2) inst.formula = Formula::implies(Formula::conj(a, a), a);
        else {
          auto y = detail::random_intervention(rng, m);
          Formula g = detail::global_atom(rng, m);
          inst.formula = Formula::implies(Formula::intervene(y, g), Formula::box(Formula::intervene(y, g)));
        }
        break;
      }
      case Scheme::Dia:
      case Scheme::Box: {
        auto y = detail::random_intervention(rng, m);
        Formula e = detail::random_event(rng, shape, budget());
        bool dia = scheme == Scheme::Dia;
        Formula lhs = Formula::intervene(y, dia ? Formula::dia(e) : Formula::box(e));
        Formula inner = Formula::intervene(y, e);
        Formula rhs = dia ? Formula::dia(inner) : Formula::box(inner);
        inst.formula = Formula::conj(Formula::implies(lhs, rhs), Formula::implies(rhs, lhs));
        break;
      }
      case Scheme::G:
      case Scheme::LocalG: {
        auto y = detail::random_intervention(rng, m);
        Formula atom = detail::global_atom(rng, m);
        if (scheme == Scheme::LocalG) atom = Formula::local(atom.variable(), atom.value());
        inst.formula = Formula::implies(Formula::intervene(y, atom), Formula::box(Formula::intervene(y, atom)));
        break;
      }
    }
    out.push_back(std::move(inst));
  }
  return out;
}

struct Counterexample {
  Scheme scheme = Scheme::K;
  std::string world;  // empty for Necessitation (a model-level failure)
  Formula instance = Formula::truth();
};

// First instance that fails at some world, if any. Necessitation fails when
// the premise is valid in the model but its box is not.
inline std::optional<Counterexample> check_scheme(const Setting& s, const std::vector<SchemeInstance>& instances) {
  for (const auto& inst : instances) {
    if (inst.scheme == Scheme::Necessitation) {
      if (valid_in_model(s, inst.formula) && !valid_in_model(s, Formula::box(inst.formula)))
        return Counterexample{inst.scheme, "", inst.formula};
      continue;
    }
    CompiledFormula f = s.model().compile(inst.formula);
    for (std::size_t w = 0; w < s.model().world_count(); ++w)
      if (!satisfies(s, w, f)) return Counterexample{inst.scheme, s.model().worlds()[w], inst.formula};
  }
  return std::nullopt;
}

inline std::optional<Counterexample> check_scheme(const Setting& s, Scheme scheme, std::size_t samples,
                                                  std::uint64_t seed) {
  return check_scheme(s, sample_instances(s.model(), scheme, samples, seed));
}

struct AxiomReport {
  std::size_t models = 0;
  std::map<Scheme, std::size_t> instances;
  std::map<Scheme, std::size_t> failures;  // instances with a counterexample
  std::size_t necessitation_exercised = 0;  // premises valid in their model
  std::optional<Counterexample> first_failure;  // among the sound schemes

  bool sound() const {
    for (Scheme s : kSoundSchemes)
      if (failures.count(s) && failures.at(s) > 0) return false;
    return true;
  }
};

// Generates `models` models from consecutive seeds and checks every scheme,
// including the LocalG mutation, on `samples` instances each.
inline AxiomReport run_axiom_suite(ModelGenSpec spec, std::size_t models, std::size_t samples) {
  AxiomReport report;
  std::uint64_t base = spec.seed;
  const Scheme all[] = {Scheme::K, Scheme::Necessitation, Scheme::Dia, Scheme::Box, Scheme::G, Scheme::LocalG};
  for (std::size_t i = 0; i < models; ++i) {
    spec.seed = base + i;
    GeneratedModel g = generate_model(spec);
    Setting s = g.setting();
    ++report.models;
    for (Scheme scheme : all) {
      auto instances = sample_instances(*g.model, scheme, samples, spec.seed * 31 + static_cast<std::uint64_t>(scheme));
      for (const auto& inst : instances) {
        ++report.instances[scheme];
        if (scheme == Scheme::Necessitation && valid_in_model(s, inst.formula)) ++report.necessitation_exercised;
        if (auto cx = check_scheme(s, std::vector<SchemeInstance>{inst})) {
          ++report.failures[scheme];
          if (scheme != Scheme::LocalG && !report.first_failure) report.first_failure = cx;
        }
      }
    }
  }
  return report;
}

}  // namespace causalmk
