#pragma once

/*
 * Causal Kripke models.
 *
 * A model has a signature (exogenous and endogenous variables with a finite
 * range per (variable, world)), a finite list of worlds, an accessibility
 * relation and one structural equation per endogenous (variable, world)
 * pair. Models are validated on construction: every reference resolves,
 * every table is total and in range, and the dependency graph over pairs
 * is acyclic. Once built a model is immutable.
 *
 * Internally pairs are numbered node = variable * world_count + world, with
 * exogenous variables first, so a valuation is a flat vector of values.
 */

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "causalmk/error.hpp"
#include "causalmk/formula.hpp"

namespace causalmk {

using Range = std::vector<Value>;
using NodeId = std::uint32_t;

// Marks "no forced value" in an override vector.
inline constexpr Value kUnset = std::numeric_limits<Value>::min();

namespace detail {
inline Range normalized_range(Range r, const std::string& what) {
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  if (r.empty()) throw RangeError("empty range for " + what);
  return r;
}

inline bool in_range(const Range& r, Value v) { return std::binary_search(r.begin(), r.end(), v); }
}  // namespace detail

class Signature {
 public:
  Signature& add_exogenous(std::string name, Range range) { return add(std::move(name), std::move(range), true); }
  Signature& add_endogenous(std::string name, Range range) { return add(std::move(name), std::move(range), false); }

  // Overrides the range of one (variable, world) pair.
  Signature& set_range(const std::string& variable, const std::string& world, Range range) {
    if (!contains(variable)) throw DanglingRefError("unknown variable '" + variable + "'");
    overrides_[{variable, world}] = detail::normalized_range(std::move(range), variable + "@" + world);
    return *this;
  }

  const std::vector<std::string>& exogenous() const { return exogenous_; }
  const std::vector<std::string>& endogenous() const { return endogenous_; }

  bool is_exogenous(std::string_view v) const {
    return std::find(exogenous_.begin(), exogenous_.end(), v) != exogenous_.end();
  }
  bool is_endogenous(std::string_view v) const {
    return std::find(endogenous_.begin(), endogenous_.end(), v) != endogenous_.end();
  }
  bool contains(std::string_view v) const { return is_exogenous(v) || is_endogenous(v); }

  const Range& default_range(const std::string& variable) const {
    auto it = default_range_.find(variable);
    if (it == default_range_.end()) throw DanglingRefError("unknown variable '" + variable + "'");
    return it->second;
  }

  const Range& range(const std::string& variable, const std::string& world) const {
    auto it = overrides_.find({variable, world});
    if (it != overrides_.end()) return it->second;
    return default_range(variable);
  }

  const std::map<PairRef, Range>& overrides() const { return overrides_; }

 private:
  Signature& add(std::string name, Range range, bool exo) {
    if (name.empty()) throw DeclarationError("empty variable name");
    if (contains(name))
      throw DeclarationError("variable '" + name + "' declared twice (exogenous and endogenous sets must be disjoint)");
    default_range_[name] = detail::normalized_range(std::move(range), name);
    (exo ? exogenous_ : endogenous_).push_back(std::move(name));
    return *this;
  }

  std::vector<std::string> exogenous_;
  std::vector<std::string> endogenous_;
  std::map<std::string, Range> default_range_;
  std::map<PairRef, Range> overrides_;
};

// Explicit finite map from parent values (in parent order) to the output.
struct TableEquation {
  std::vector<PairRef> parents;
  std::map<std::vector<Value>, Value> rows;

  friend bool operator==(const TableEquation&, const TableEquation&) = default;
};

// Boolean equation: the target is 1 iff the event holds at the target's world.
// Its parents are the pairs the event can read from that world.
struct FormulaEquation {
  Formula event;

  friend bool operator==(const FormulaEquation& a, const FormulaEquation& b) { return a.event == b.event; }
};

using Equation = std::variant<TableEquation, FormulaEquation>;

inline Equation constant_equation(Value v) { return TableEquation{{}, {{{}, v}}}; }

class Intervention {
 public:
  Intervention() = default;
  explicit Intervention(std::vector<Assignment> assignments) : assignments_(std::move(assignments)) {
    for (std::size_t i = 0; i < assignments_.size(); ++i)
      for (std::size_t j = i + 1; j < assignments_.size(); ++j)
        if (assignments_[i].target == assignments_[j].target)
          throw DeclarationError("intervention sets " + to_string(assignments_[i].target) + " twice");
  }

  const std::vector<Assignment>& assignments() const { return assignments_; }
  bool empty() const { return assignments_.empty(); }

 private:
  std::vector<Assignment> assignments_;
};

namespace detail {
struct CompiledNode {
  Op op = Op::True;
  std::uint32_t variable = 0;  // LocalAtom
  NodeId node = 0;             // GlobalAtom
  Value value = 0;
  std::int32_t lhs = -1;
  std::int32_t rhs = -1;
  std::vector<std::pair<NodeId, Value>> assignments;  // Intervene
};
}  // namespace detail

// A formula with every name resolved against one model layout. Valid for the
// model it was compiled against and for models derived from it by intervention.
class CompiledFormula {
 public:
  bool empty() const { return nodes_.empty(); }
  bool is_event() const { return event_; }

 private:
  friend class Model;
  std::vector<detail::CompiledNode> nodes_;
  std::int32_t root_ = -1;
  bool event_ = true;
};

class Valuation {
 public:
  Valuation() = default;
  explicit Valuation(std::vector<Value> values) : values_(std::move(values)) {}

  Value operator[](NodeId n) const { return values_[n]; }
  std::span<const Value> values() const { return values_; }

  friend bool operator==(const Valuation&, const Valuation&) = default;

 private:
  std::vector<Value> values_;
};

class Model;

class Context {
 public:
  Context() = default;
  // Validates totality over exogenous pairs and that every value is in range.
  Context(const Model& model, const std::map<PairRef, Value>& values);

  std::span<const Value> values() const { return values_; }

  friend bool operator==(const Context&, const Context&) = default;

 private:
  std::vector<Value> values_;
};

class Model {
 public:
  Model(Signature signature, std::vector<std::string> worlds,
        std::vector<std::pair<std::string, std::string>> relation, std::map<PairRef, Equation> equations) {
    build(std::move(signature), std::move(worlds), std::move(relation), std::move(equations));
  }

  const Signature& signature() const { return signature_; }
  const std::vector<std::string>& worlds() const { return worlds_; }
  const std::vector<std::string>& variables() const { return variables_; }
  const std::vector<std::pair<std::string, std::string>>& relation() const { return relation_; }
  const std::map<PairRef, Equation>& equations() const { return equations_; }

  std::size_t world_count() const { return worlds_.size(); }
  std::size_t variable_count() const { return variables_.size(); }
  std::size_t node_count() const { return variables_.size() * worlds_.size(); }

  std::optional<std::size_t> find_world(std::string_view name) const {
    auto it = world_index_.find(std::string(name));
    if (it == world_index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::size_t> find_variable(std::string_view name) const {
    auto it = variable_index_.find(std::string(name));
    if (it == variable_index_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t world_index(std::string_view name) const {
    if (auto w = find_world(name)) return *w;
    throw DanglingRefError("unknown world '" + std::string(name) + "'");
  }
  std::size_t variable_index(std::string_view name) const {
    if (auto v = find_variable(name)) return *v;
    throw DanglingRefError("unknown variable '" + std::string(name) + "'");
  }

  NodeId node(std::size_t variable, std::size_t world) const {
    return static_cast<NodeId>(variable * worlds_.size() + world);
  }
  NodeId node(const PairRef& p) const { return node(variable_index(p.variable), world_index(p.world)); }
  std::size_t variable_of(NodeId n) const { return n / worlds_.size(); }
  std::size_t world_of(NodeId n) const { return n % worlds_.size(); }
  PairRef pair(NodeId n) const { return {variables_[variable_of(n)], worlds_[world_of(n)]}; }
  std::string name(NodeId n) const { return to_string(pair(n)); }

  bool is_endogenous(NodeId n) const { return endogenous_variable_[variable_of(n)]; }
  bool is_endogenous_variable(std::size_t v) const { return endogenous_variable_[v]; }
  const Range& range(NodeId n) const { return ranges_[n]; }

  const std::vector<std::size_t>& successors(std::size_t world) const { return successors_[world]; }
  const std::vector<std::size_t>& predecessors(std::size_t world) const { return predecessors_[world]; }
  bool related(std::size_t from, std::size_t to) const {
    const auto& s = successors_[from];
    return std::binary_search(s.begin(), s.end(), to);
  }

  const Equation& equation(NodeId n) const {
    if (!is_endogenous(n)) throw DeclarationError(name(n) + " is exogenous and has no equation");
    return equations_.at(pair(n));
  }
  // Pairs the equation of n may read, sorted by node id.
  const std::vector<NodeId>& declared_parents(NodeId n) const { return compiled_[n].parents; }

  // Endogenous nodes in evaluation order (parents first; ties by world
  // name, then variable name).
  const std::vector<NodeId>& topological_order() const { return topological_order_; }

  // Endogenous nodes sorted by (world name, variable name).
  const std::vector<NodeId>& endogenous_nodes() const { return endogenous_nodes_; }

  // Resolves every name in f. Intervention targets must be endogenous and
  // in range.
  CompiledFormula compile(const Formula& f) const {
    CompiledFormula out;
    out.event_ = f.is_event();
    out.root_ = compile_into(out, f);
    return out;
  }

  // Computes all values in topological order. `forced` is either empty or
  // node-indexed with kUnset for pairs that follow their equation.
  void evaluate_into(std::span<const Value> context, std::span<const Value> forced, std::vector<Value>& out) const {
    out.assign(context.begin(), context.end());
    for (NodeId n : topological_order_) {
      if (!forced.empty() && forced[n] != kUnset) {
        out[n] = forced[n];
        continue;
      }
      out[n] = compute(n, out, context);
    }
  }

  bool holds(const CompiledFormula& f, std::size_t world, std::span<const Value> valuation,
             std::span<const Value> context) const {
    return eval(f, f.root_, world, valuation, context);
  }

  // Pairs that f, evaluated at `world`, can read directly; sorted.
  std::vector<NodeId> read_set(const CompiledFormula& f, std::size_t world) const {
    std::set<std::pair<std::int32_t, std::size_t>> seen;
    std::set<NodeId> reads;
    collect_reads(f, f.root_, world, seen, reads);
    return {reads.begin(), reads.end()};
  }

  // Endogenous nodes among `seeds` and their ancestors through declared parents.
  std::vector<NodeId> endogenous_ancestors(const std::vector<NodeId>& seeds) const {
    std::vector<bool> mark(node_count(), false);
    std::vector<NodeId> stack;
    for (NodeId s : seeds)
      if (is_endogenous(s) && !mark[s]) {
        mark[s] = true;
        stack.push_back(s);
      }
    while (!stack.empty()) {
      NodeId n = stack.back();
      stack.pop_back();
      for (NodeId p : compiled_[n].parents)
        if (is_endogenous(p) && !mark[p]) {
          mark[p] = true;
          stack.push_back(p);
        }
    }
    std::vector<NodeId> out;
    for (NodeId n : endogenous_nodes_)
      if (mark[n]) out.push_back(n);
    return out;
  }

  // Position of v within range(n); -1 when absent.
  int range_position(NodeId n, Value v) const {
    const Range& r = ranges_[n];
    auto it = std::lower_bound(r.begin(), r.end(), v);
    if (it == r.end() || *it != v) return -1;
    return static_cast<int>(it - r.begin());
  }

 private:
  struct CompiledEquation {
    bool is_table = true;
    std::vector<NodeId> parents;           // sorted, for the dependency graph
    std::vector<NodeId> table_parents;     // in declaration order
    std::vector<std::size_t> strides;
    std::vector<Value> outputs;
    CompiledFormula formula;
  };

  void build(Signature signature, std::vector<std::string> worlds,
             std::vector<std::pair<std::string, std::string>> relation, std::map<PairRef, Equation> equations) {
    signature_ = std::move(signature);
    if (worlds.empty()) throw DeclarationError("a model needs at least one world");
    worlds_ = std::move(worlds);
    for (std::size_t i = 0; i < worlds_.size(); ++i) {
      if (worlds_[i].empty()) throw DeclarationError("empty world name");
      if (!world_index_.emplace(worlds_[i], i).second)
        throw DeclarationError("world '" + worlds_[i] + "' listed twice");
    }
    for (const auto& v : signature_.exogenous()) variables_.push_back(v);
    for (const auto& v : signature_.endogenous()) variables_.push_back(v);
    for (std::size_t i = 0; i < variables_.size(); ++i) {
      variable_index_[variables_[i]] = i;
      endogenous_variable_.push_back(i >= signature_.exogenous().size());
    }
    for (const auto& [p, r] : signature_.overrides()) {
      (void)r;
      world_index(p.world);
    }

    successors_.assign(worlds_.size(), {});
    predecessors_.assign(worlds_.size(), {});
    std::sort(relation.begin(), relation.end());
    relation.erase(std::unique(relation.begin(), relation.end()), relation.end());
    for (const auto& [a, b] : relation) {
      std::size_t from = world_index(a);
      std::size_t to = world_index(b);
      successors_[from].push_back(to);
      predecessors_[to].push_back(from);
    }
    for (auto& s : successors_) std::sort(s.begin(), s.end());
    for (auto& s : predecessors_) std::sort(s.begin(), s.end());
    relation_ = std::move(relation);

    ranges_.resize(node_count());
    for (std::size_t v = 0; v < variables_.size(); ++v)
      for (std::size_t w = 0; w < worlds_.size(); ++w)
        ranges_[node(v, w)] = signature_.range(variables_[v], worlds_[w]);

    for (const auto& [p, eq] : equations) {
      NodeId n = node(p);
      if (!is_endogenous(n)) throw DeclarationError("equation given for exogenous pair " + to_string(p));
    }
    endogenous_nodes_.clear();
    for (std::size_t v = 0; v < variables_.size(); ++v)
      if (endogenous_variable_[v])
        for (std::size_t w = 0; w < worlds_.size(); ++w) endogenous_nodes_.push_back(node(v, w));
    std::sort(endogenous_nodes_.begin(), endogenous_nodes_.end(), [&](NodeId a, NodeId b) {
      return std::tie(worlds_[world_of(a)], variables_[variable_of(a)]) <
             std::tie(worlds_[world_of(b)], variables_[variable_of(b)]);
    });
    for (NodeId n : endogenous_nodes_)
      if (!equations.count(pair(n))) throw DeclarationError("no equation for " + name(n));
    equations_ = std::move(equations);

    compiled_.assign(node_count(), {});
    for (NodeId n : endogenous_nodes_) compiled_[n] = compile_equation(n, equations_.at(pair(n)));
    order();
  }

  CompiledEquation compile_equation(NodeId target, const Equation& eq) const {
    CompiledEquation ce;
    if (const auto* table = std::get_if<TableEquation>(&eq)) {
      std::size_t size = 1;
      for (const auto& p : table->parents) {
        NodeId pn = node(p);
        if (pn == target) throw DeclarationError("equation of " + name(target) + " lists itself as a parent");
        if (std::find(ce.table_parents.begin(), ce.table_parents.end(), pn) != ce.table_parents.end())
          throw DeclarationError("equation of " + name(target) + " lists " + name(pn) + " twice");
        ce.table_parents.push_back(pn);
      }
      ce.strides.assign(ce.table_parents.size(), 1);
      for (std::size_t i = ce.table_parents.size(); i-- > 0;) {
        ce.strides[i] = size;
        size *= ranges_[ce.table_parents[i]].size();
      }
      ce.outputs.assign(size, kUnset);
      for (const auto& [key, out] : table->rows) {
        if (key.size() != ce.table_parents.size())
          throw DeclarationError("table row of " + name(target) + " has wrong arity");
        std::size_t idx = 0;
        for (std::size_t i = 0; i < key.size(); ++i) {
          int pos = range_position(ce.table_parents[i], key[i]);
          if (pos < 0)
            throw RangeError("table key value " + std::to_string(key[i]) + " outside the range of " +
                             name(ce.table_parents[i]));
          idx += static_cast<std::size_t>(pos) * ce.strides[i];
        }
        if (!detail::in_range(ranges_[target], out))
          throw RangeError("equation output " + std::to_string(out) + " outside the range of " + name(target));
        ce.outputs[idx] = out;
      }
      for (Value o : ce.outputs)
        if (o == kUnset) throw DeclarationError("table equation of " + name(target) + " is not total");
      ce.parents = ce.table_parents;
      std::sort(ce.parents.begin(), ce.parents.end());
      return ce;
    }
    const auto& fe = std::get<FormulaEquation>(eq);
    if (!fe.event.is_event())
      throw DeclarationError("equation of " + name(target) + " must be an event (no interventions)");
    if (ranges_[target] != Range{0, 1})
      throw RangeError("formula equation for " + name(target) + " requires range {0,1}");
    ce.is_table = false;
    ce.formula = compile(fe.event);
    ce.parents = read_set(ce.formula, world_of(target));
    return ce;
  }

  void order() {
    std::vector<std::size_t> pending(node_count(), 0);
    std::vector<std::vector<NodeId>> children(node_count());
    for (NodeId n : endogenous_nodes_)
      for (NodeId p : compiled_[n].parents)
        if (is_endogenous(p)) {
          ++pending[n];
          children[p].push_back(n);
        }
    // Min-heap on rank in endogenous_nodes_, i.e. (world name, variable name).
    std::vector<std::size_t> rank(node_count(), 0);
    for (std::size_t i = 0; i < endogenous_nodes_.size(); ++i) rank[endogenous_nodes_[i]] = i;
    auto later = [&](NodeId a, NodeId b) { return rank[a] > rank[b]; };
    std::priority_queue<NodeId, std::vector<NodeId>, decltype(later)> ready(later);
    for (NodeId n : endogenous_nodes_)
      if (pending[n] == 0) ready.push(n);
    topological_order_.clear();
    while (!ready.empty()) {
      NodeId n = ready.top();
      ready.pop();
      topological_order_.push_back(n);
      for (NodeId c : children[n])
        if (--pending[c] == 0) ready.push(c);
    }
    if (topological_order_.size() == endogenous_nodes_.size()) return;

    // Walk parents among the unresolved nodes until a node repeats.
    NodeId start = 0;
    for (NodeId n : endogenous_nodes_)
      if (pending[n] > 0) {
        start = n;
        break;
      }
    std::vector<NodeId> path;
    std::vector<int> at(node_count(), -1);
    NodeId cur = start;
    while (at[cur] < 0) {
      at[cur] = static_cast<int>(path.size());
      path.push_back(cur);
      for (NodeId p : compiled_[cur].parents)
        if (is_endogenous(p) && pending[p] > 0) {
          cur = p;
          break;
        }
    }
    // path[at[cur]..] is a cycle in parent direction; report it in
    // dependency direction.
    std::vector<std::string> cycle;
    for (std::size_t i = path.size(); i-- > static_cast<std::size_t>(at[cur]);) cycle.push_back(name(path[i]));
    cycle.push_back(cycle.front());
    std::string text;
    for (std::size_t i = 0; i < cycle.size(); ++i) text += (i ? " -> " : "") + cycle[i];
    throw CycleError("model is not recursive: " + text, cycle);
  }

  Value compute(NodeId n, std::span<const Value> partial, std::span<const Value> context) const {
    const CompiledEquation& ce = compiled_[n];
    if (!ce.is_table) return holds(ce.formula, world_of(n), partial, context) ? 1 : 0;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < ce.table_parents.size(); ++i) {
      NodeId p = ce.table_parents[i];
      int pos = range_position(p, partial[p]);
      if (pos < 0) throw RangeError("value " + std::to_string(partial[p]) + " outside the range of " + name(p));
      idx += static_cast<std::size_t>(pos) * ce.strides[i];
    }
    return ce.outputs[idx];
  }

  std::int32_t compile_into(CompiledFormula& out, const Formula& f) const {
    detail::CompiledNode cn;
    cn.op = f.op();
    switch (f.op()) {
      case Op::True:
      case Op::False:
        break;
      case Op::LocalAtom:
        cn.variable = static_cast<std::uint32_t>(variable_index(f.variable()));
        cn.value = f.value();
        break;
      case Op::GlobalAtom:
        cn.node = node(variable_index(f.variable()), world_index(f.world()));
        cn.value = f.value();
        break;
      case Op::Intervene:
        for (const auto& a : f.assignments()) {
          NodeId t = node(a.target);
          if (!is_endogenous(t)) throw DeclarationError("cannot intervene on exogenous pair " + name(t));
          if (!detail::in_range(ranges_[t], a.value))
            throw RangeError("intervention value " + std::to_string(a.value) + " outside the range of " + name(t));
          cn.assignments.emplace_back(t, a.value);
        }
        cn.lhs = compile_into(out, f.body());
        break;
      default:
        cn.lhs = compile_into(out, f.lhs());
        if (f.is_binary()) cn.rhs = compile_into(out, f.rhs());
        break;
    }
    out.nodes_.push_back(std::move(cn));
    return static_cast<std::int32_t>(out.nodes_.size() - 1);
  }

  bool eval(const CompiledFormula& f, std::int32_t idx, std::size_t world, std::span<const Value> val,
            std::span<const Value> context) const {
    const detail::CompiledNode& n = f.nodes_[static_cast<std::size_t>(idx)];
    switch (n.op) {
      case Op::True:
        return true;
      case Op::False:
        return false;
      case Op::LocalAtom:
        return val[node(n.variable, world)] == n.value;
      case Op::GlobalAtom:
        return val[n.node] == n.value;
      case Op::Not:
        return !eval(f, n.lhs, world, val, context);
      case Op::And:
        return eval(f, n.lhs, world, val, context) && eval(f, n.rhs, world, val, context);
      case Op::Or:
        return eval(f, n.lhs, world, val, context) || eval(f, n.rhs, world, val, context);
      case Op::Implies:
        return !eval(f, n.lhs, world, val, context) || eval(f, n.rhs, world, val, context);
      case Op::Box:
        for (std::size_t s : successors_[world])
          if (!eval(f, n.lhs, s, val, context)) return false;
        return true;
      case Op::Dia:
        for (std::size_t s : successors_[world])
          if (eval(f, n.lhs, s, val, context)) return true;
        return false;
      case Op::ConvBox:
        for (std::size_t s : predecessors_[world])
          if (!eval(f, n.lhs, s, val, context)) return false;
        return true;
      case Op::ConvDia:
        for (std::size_t s : predecessors_[world])
          if (eval(f, n.lhs, s, val, context)) return true;
        return false;
      case Op::Intervene: {
        std::vector<Value> forced(node_count(), kUnset);
        for (const auto& [t, v] : n.assignments) forced[t] = v;
        std::vector<Value> after;
        evaluate_into(context, forced, after);
        return eval(f, n.lhs, world, after, context);
      }
    }
    return false;
  }

  void collect_reads(const CompiledFormula& f, std::int32_t idx, std::size_t world,
                     std::set<std::pair<std::int32_t, std::size_t>>& seen, std::set<NodeId>& reads) const {
    if (!seen.emplace(idx, world).second) return;
    const detail::CompiledNode& n = f.nodes_[static_cast<std::size_t>(idx)];
    switch (n.op) {
      case Op::True:
      case Op::False:
        return;
      case Op::LocalAtom:
        reads.insert(node(n.variable, world));
        return;
      case Op::GlobalAtom:
        reads.insert(n.node);
        return;
      case Op::Box:
      case Op::Dia:
        for (std::size_t s : successors_[world]) collect_reads(f, n.lhs, s, seen, reads);
        return;
      case Op::ConvBox:
      case Op::ConvDia:
        for (std::size_t s : predecessors_[world]) collect_reads(f, n.lhs, s, seen, reads);
        return;
      default:
        collect_reads(f, n.lhs, world, seen, reads);
        if (n.rhs >= 0) collect_reads(f, n.rhs, world, seen, reads);
        return;
    }
  }

  Signature signature_;
  std::vector<std::string> worlds_;
  std::map<std::string, std::size_t> world_index_;
  std::vector<std::string> variables_;
  std::map<std::string, std::size_t> variable_index_;
  std::vector<bool> endogenous_variable_;
  std::vector<std::pair<std::string, std::string>> relation_;
  std::vector<std::vector<std::size_t>> successors_;
  std::vector<std::vector<std::size_t>> predecessors_;
  std::vector<Range> ranges_;
  std::map<PairRef, Equation> equations_;
  std::vector<CompiledEquation> compiled_;
  std::vector<NodeId> endogenous_nodes_;
  std::vector<NodeId> topological_order_;
};

inline Context::Context(const Model& model, const std::map<PairRef, Value>& values)
    : values_(model.node_count(), 0) {
  std::vector<bool> seen(model.node_count(), false);
  for (const auto& [p, v] : values) {
    NodeId n = model.node(p);
    if (model.is_endogenous(n)) throw DeclarationError("context assigns endogenous pair " + to_string(p));
    if (!detail::in_range(model.range(n), v))
      throw RangeError("context value " + std::to_string(v) + " outside the range of " + to_string(p));
    values_[n] = v;
    seen[n] = true;
  }
  for (NodeId n = 0; n < model.node_count(); ++n)
    if (!model.is_endogenous(n) && !seen[n]) throw DeclarationError("context leaves " + model.name(n) + " unset");
}

inline Model build_model(Signature signature, std::vector<std::string> worlds,
                         std::vector<std::pair<std::string, std::string>> relation,
                         std::map<PairRef, Equation> equations) {
  return Model(std::move(signature), std::move(worlds), std::move(relation), std::move(equations));
}

inline Valuation evaluate(const Model& model, const Context& context) {
  std::vector<Value> out;
  model.evaluate_into(context.values(), {}, out);
  return Valuation(std::move(out));
}

// Replaces the equation of every target by a constant. Worlds, relation and
// signature are unchanged.
inline Model intervene(const Model& model, const Intervention& intervention) {
  auto equations = model.equations();
  for (const auto& a : intervention.assignments()) {
    NodeId n = model.node(a.target);
    if (!model.is_endogenous(n)) throw DeclarationError("cannot intervene on exogenous pair " + to_string(a.target));
    if (!detail::in_range(model.range(n), a.value))
      throw RangeError("intervention value " + std::to_string(a.value) + " outside the range of " +
                       to_string(a.target));
    equations[a.target] = constant_equation(a.value);
  }
  return Model(model.signature(), model.worlds(), model.relation(), std::move(equations));
}

// Pairs the equation of `target` actually depends on: (X,w) is a parent iff
// two assignments of the declared parents differing only at (X,w) give
// different outputs.
inline std::set<PairRef> parents(const Model& model, const PairRef& target) {
  NodeId t = model.node(target);
  if (!model.is_endogenous(t)) throw DeclarationError(to_string(target) + " is exogenous");
  const auto& declared = model.declared_parents(t);
  const Equation& eq = model.equation(t);
  const auto* table = std::get_if<TableEquation>(&eq);
  CompiledFormula formula;
  if (!table) formula = model.compile(std::get<FormulaEquation>(eq).event);

  std::vector<Value> val(model.node_count(), 0);
  auto output = [&]() -> Value {
    if (table) {
      std::vector<Value> key;
      for (const auto& p : table->parents) key.push_back(val[model.node(p)]);
      return table->rows.at(key);
    }
    return model.holds(formula, model.world_of(t), val, val) ? 1 : 0;
  };

  std::set<PairRef> out;
  std::vector<std::size_t> pos(declared.size(), 0);
  // Enumerate every assignment of the declared parents (mixed radix).
  for (std::size_t i = 0; i < declared.size(); ++i) val[declared[i]] = model.range(declared[i]).front();
  while (true) {
    for (std::size_t i = 0; i < declared.size(); ++i) {
      NodeId p = declared[i];
      if (out.count(model.pair(p))) continue;
      Value base = output();
      Value keep = val[p];
      for (Value alt : model.range(p)) {
        if (alt == keep) continue;
        val[p] = alt;
        bool differs = output() != base;
        val[p] = keep;
        if (differs) {
          out.insert(model.pair(p));
          break;
        }
      }
    }
    std::size_t i = 0;
    for (; i < declared.size(); ++i) {
      const Range& r = model.range(declared[i]);
      if (++pos[i] < r.size()) {
        val[declared[i]] = r[pos[i]];
        break;
      }
      pos[i] = 0;
      val[declared[i]] = r.front();
    }
    if (i == declared.size()) break;
  }
  return out;
}

inline Value value_of(const Model& model, const Valuation& valuation, std::string_view variable,
                      std::string_view world) {
  return valuation[model.node(model.variable_index(variable), model.world_index(world))];
}

// Endogenous variables with value 1 at `world`.
inline std::set<std::string> true_variables(const Model& model, const Valuation& valuation, std::string_view world) {
  std::size_t w = model.world_index(world);
  std::set<std::string> out;
  for (std::size_t v = 0; v < model.variable_count(); ++v)
    if (model.is_endogenous_variable(v) && valuation[model.node(v, w)] == 1) out.insert(model.variables()[v]);
  return out;
}

}  // namespace causalmk
