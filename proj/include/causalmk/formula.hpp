#pragma once

/*
 * Abstract syntax for the hybrid modal causal language.
 *
 * Events are built from local atoms (X=x, read at the evaluation world),
 * global atoms (X@w=x, world-independent), boolean connectives and the
 * modalities over R and its converse. Causal formulas additionally allow
 * [Y@w := y, ...] body, where the body must be an event.
 *
 * Formulas are immutable and share structure; copying is cheap.
 */

#include <compare>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "causalmk/error.hpp"

namespace causalmk {

using Value = int;

// A (variable, world) pair.
struct PairRef {
  std::string variable;
  std::string world;

  auto operator<=>(const PairRef&) const = default;
};

inline std::string to_string(const PairRef& p) { return p.variable + "@" + p.world; }

// One conjunct (X,w)=x; used for interventions and candidate causes.
struct Assignment {
  PairRef target;
  Value value = 0;

  auto operator<=>(const Assignment&) const = default;
};

inline std::string to_string(const Assignment& a) {
  return to_string(a.target) + "=" + std::to_string(a.value);
}

enum class Op {
  True,
  False,
  LocalAtom,
  GlobalAtom,
  Not,
  And,
  Or,
  Implies,
  Box,
  Dia,
  ConvBox,
  ConvDia,
  Intervene,
};

class Formula {
 public:
  static Formula truth() { return Formula(make(Op::True)); }
  static Formula falsity() { return Formula(make(Op::False)); }

  static Formula local(std::string variable, Value value) {
    auto n = make(Op::LocalAtom);
    n->variable = std::move(variable);
    n->value = value;
    return Formula(std::move(n));
  }

  static Formula global(std::string variable, std::string world, Value value) {
    auto n = make(Op::GlobalAtom);
    n->variable = std::move(variable);
    n->world = std::move(world);
    n->value = value;
    return Formula(std::move(n));
  }

  static Formula negate(Formula f) { return unary(Op::Not, std::move(f)); }
  static Formula conj(Formula a, Formula b) { return binary(Op::And, std::move(a), std::move(b)); }
  static Formula disj(Formula a, Formula b) { return binary(Op::Or, std::move(a), std::move(b)); }
  static Formula implies(Formula a, Formula b) {
    return binary(Op::Implies, std::move(a), std::move(b));
  }
  static Formula box(Formula f) { return unary(Op::Box, std::move(f)); }
  static Formula dia(Formula f) { return unary(Op::Dia, std::move(f)); }
  static Formula conv_box(Formula f) { return unary(Op::ConvBox, std::move(f)); }
  static Formula conv_dia(Formula f) { return unary(Op::ConvDia, std::move(f)); }

  // Throws NestedInterventionError if the body is not an event and
  // DeclarationError if two assignments share a target.
  static Formula intervene(std::vector<Assignment> assignments, Formula body) {
    if (!body.is_event())
      throw NestedInterventionError("intervention body must be an event (no nested interventions)");
    for (std::size_t i = 0; i < assignments.size(); ++i)
      for (std::size_t j = i + 1; j < assignments.size(); ++j)
        if (assignments[i].target == assignments[j].target)
          throw DeclarationError("intervention sets " + to_string(assignments[i].target) + " twice");
    auto n = make(Op::Intervene);
    n->assignments = std::move(assignments);
    n->lhs = std::move(body).node_;
    n->event = false;
    return Formula(std::move(n));
  }

  // Conjunction of a list; empty list gives true.
  static Formula all_of(std::vector<Formula> parts) {
    if (parts.empty()) return truth();
    Formula acc = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) acc = conj(std::move(acc), std::move(parts[i]));
    return acc;
  }

  Op op() const { return node_->op; }
  const std::string& variable() const { return node_->variable; }
  const std::string& world() const { return node_->world; }
  Value value() const { return node_->value; }
  Formula lhs() const { return Formula(node_->lhs); }
  Formula rhs() const { return Formula(node_->rhs); }
  Formula body() const { return lhs(); }
  const std::vector<Assignment>& assignments() const { return node_->assignments; }

  bool is_unary() const {
    switch (op()) {
      case Op::Not:
      case Op::Box:
      case Op::Dia:
      case Op::ConvBox:
      case Op::ConvDia:
      case Op::Intervene:
        return true;
      default:
        return false;
    }
  }
  bool is_binary() const { return op() == Op::And || op() == Op::Or || op() == Op::Implies; }

  // True when no intervention occurs anywhere in the formula.
  bool is_event() const { return node_->event; }

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    const Node& x = *a.node_;
    const Node& y = *b.node_;
    if (x.op != y.op || x.variable != y.variable || x.world != y.world || x.value != y.value ||
        x.assignments != y.assignments)
      return false;
    if ((x.lhs == nullptr) != (y.lhs == nullptr) || (x.rhs == nullptr) != (y.rhs == nullptr))
      return false;
    if (x.lhs && !(Formula(x.lhs) == Formula(y.lhs))) return false;
    if (x.rhs && !(Formula(x.rhs) == Formula(y.rhs))) return false;
    return true;
  }

 private:
  struct Node {
    Op op = Op::True;
    std::string variable;
    std::string world;
    Value value = 0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
    std::vector<Assignment> assignments;
    bool event = true;
  };

  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static std::shared_ptr<Node> make(Op op) {
    auto n = std::make_shared<Node>();
    n->op = op;
    return n;
  }

  static Formula unary(Op op, Formula f) {
    auto n = make(op);
    n->event = f.is_event();
    n->lhs = std::move(f.node_);
    return Formula(std::move(n));
  }

  static Formula binary(Op op, Formula a, Formula b) {
    auto n = make(op);
    n->event = a.is_event() && b.is_event();
    n->lhs = std::move(a.node_);
    n->rhs = std::move(b.node_);
    return Formula(std::move(n));
  }

  std::shared_ptr<const Node> node_;
};

// Rewrites derived operators into the core connectives:
//   false   -> !true
//   a | b   -> !(!a & !b)
//   a -> b  -> !(a & !b)
//   dia a   -> !box !a        (likewise cdia via cbox)
inline Formula normalize(const Formula& f) {
  switch (f.op()) {
    case Op::True:
    case Op::LocalAtom:
    case Op::GlobalAtom:
      return f;
    case Op::False:
      return Formula::negate(Formula::truth());
    case Op::Not:
      return Formula::negate(normalize(f.lhs()));
    case Op::And:
      return Formula::conj(normalize(f.lhs()), normalize(f.rhs()));
    case Op::Or:
      return Formula::negate(Formula::conj(Formula::negate(normalize(f.lhs())),
                                           Formula::negate(normalize(f.rhs()))));
    case Op::Implies:
      return Formula::negate(
          Formula::conj(normalize(f.lhs()), Formula::negate(normalize(f.rhs()))));
    case Op::Box:
      return Formula::box(normalize(f.lhs()));
    case Op::Dia:
      return Formula::negate(Formula::box(Formula::negate(normalize(f.lhs()))));
    case Op::ConvBox:
      return Formula::conv_box(normalize(f.lhs()));
    case Op::ConvDia:
      return Formula::negate(Formula::conv_box(Formula::negate(normalize(f.lhs()))));
    case Op::Intervene:
      return Formula::intervene(f.assignments(), normalize(f.body()));
  }
  return f;
}

// Number of connectives (atoms and constants count zero).
inline std::size_t connective_count(const Formula& f) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
    case Op::LocalAtom:
    case Op::GlobalAtom:
      return 0;
    default:
      break;
  }
  std::size_t n = 1 + connective_count(f.lhs());
  if (f.is_binary()) n += connective_count(f.rhs());
  return n;
}

}  // namespace causalmk
