#pragma once

// Text syntax for formulas.
//
//   formula  := or ( '->' formula )?
//   or       := and ( '|' and )*
//   and      := unary ( '&' unary )*
//   unary    := '!' unary
//             | ('box' | 'dia' | 'cbox' | 'cdia') '(' formula ')'
//             | '[' IDENT '@' IDENT ':=' INT (',' IDENT '@' IDENT ':=' INT)* ']' unary
//             | '(' formula ')' | 'true' | 'false'
//             | IDENT ('@' IDENT)? '=' INT
//
// Precedence is ! > & > | > ->, with -> associating to the right.

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "causalmk/error.hpp"
#include "causalmk/formula.hpp"

namespace causalmk {

namespace detail {

inline bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

inline bool is_reserved(std::string_view word) {
  return word == "true" || word == "false" || word == "box" || word == "dia" || word == "cbox" ||
         word == "cdia";
}

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : text_(text) {}

  Formula parse_all() {
    Formula f = parse_implies();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw SyntaxError(message, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }

  std::string identifier() {
    skip_ws();
    if (pos_ >= text_.size() || !is_ident_start(text_[pos_])) fail("expected identifier");
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  Value integer() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '-') ++pos_;
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      pos_ = start;
      fail("expected integer value");
    }
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    try {
      return std::stoi(std::string(text_.substr(start, pos_ - start)));
    } catch (const std::out_of_range&) {
      pos_ = start;
      fail("integer out of range");
    }
  }

  // Peeks an identifier without consuming it.
  std::string_view peek_word() {
    skip_ws();
    std::size_t end = pos_;
    if (end >= text_.size() || !is_ident_start(text_[end])) return {};
    while (end < text_.size() && is_ident_char(text_[end])) ++end;
    return text_.substr(pos_, end - pos_);
  }

  Formula parse_implies() {
    Formula lhs = parse_or();
    if (accept("->")) return Formula::implies(std::move(lhs), parse_implies());
    return lhs;
  }

  Formula parse_or() {
    Formula lhs = parse_and();
    while (accept("|")) lhs = Formula::disj(std::move(lhs), parse_and());
    return lhs;
  }

  Formula parse_and() {
    Formula lhs = parse_unary();
    while (accept("&")) lhs = Formula::conj(std::move(lhs), parse_unary());
    return lhs;
  }

  Formula parse_unary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (accept("!")) return Formula::negate(parse_unary());
    if (accept("[")) return parse_intervention();
    if (accept("(")) {
      Formula f = parse_implies();
      expect(")");
      return f;
    }
    std::string_view word = peek_word();
    if (word.empty()) fail("expected formula");
    if (word == "true" || word == "false") {
      pos_ += word.size();
      return word == "true" ? Formula::truth() : Formula::falsity();
    }
    if (word == "box" || word == "dia" || word == "cbox" || word == "cdia") {
      std::string op(word);
      pos_ += word.size();
      expect("(");
      Formula arg = parse_implies();
      expect(")");
      if (op == "box") return Formula::box(std::move(arg));
      if (op == "dia") return Formula::dia(std::move(arg));
      if (op == "cbox") return Formula::conv_box(std::move(arg));
      return Formula::conv_dia(std::move(arg));
    }
    std::string var = identifier();
    if (accept("@")) {
      std::string world = identifier();
      expect("=");
      return Formula::global(std::move(var), std::move(world), integer());
    }
    expect("=");
    return Formula::local(std::move(var), integer());
  }

  Formula parse_intervention() {
    std::size_t open = pos_ - 1;
    std::vector<Assignment> assignments;
    skip_ws();
    if (!accept("]")) {
      do {
        std::string var = identifier();
        if (is_reserved(var)) fail("reserved word '" + var + "' used as variable");
        expect("@");
        std::string world = identifier();
        expect(":=");
        assignments.push_back({{std::move(var), std::move(world)}, integer()});
      } while (accept(","));
      expect("]");
    }
    Formula body = parse_unary();
    if (!body.is_event())
      throw NestedInterventionError("nested intervention inside intervention opened at offset " +
                                    std::to_string(open));
    try {
      return Formula::intervene(std::move(assignments), std::move(body));
    } catch (const DeclarationError& e) {
      throw SyntaxError(e.what(), open);
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline std::string print_inner(const Formula& f, bool top);

inline std::string print_operand(const Formula& f) { return print_inner(f, false); }

inline std::string print_inner(const Formula& f, bool top) {
  auto wrap_binary = [&](const char* sym) {
    std::string s = print_operand(f.lhs()) + " " + sym + " " + print_operand(f.rhs());
    return top ? s : "(" + s + ")";
  };
  switch (f.op()) {
    case Op::True:
      return "true";
    case Op::False:
      return "false";
    case Op::LocalAtom:
      return f.variable() + "=" + std::to_string(f.value());
    case Op::GlobalAtom:
      return f.variable() + "@" + f.world() + "=" + std::to_string(f.value());
    case Op::Not: {
      Formula c = f.lhs();
      if (c.is_binary()) return "!" + print_operand(c);
      return "!(" + print_inner(c, true) + ")";
    }
    case Op::And:
      return wrap_binary("&");
    case Op::Or:
      return wrap_binary("|");
    case Op::Implies:
      return wrap_binary("->");
    case Op::Box:
      return "box(" + print_inner(f.lhs(), true) + ")";
    case Op::Dia:
      return "dia(" + print_inner(f.lhs(), true) + ")";
    case Op::ConvBox:
      return "cbox(" + print_inner(f.lhs(), true) + ")";
    case Op::ConvDia:
      return "cdia(" + print_inner(f.lhs(), true) + ")";
    case Op::Intervene: {
      std::string s = "[";
      for (std::size_t i = 0; i < f.assignments().size(); ++i) {
        const auto& a = f.assignments()[i];
        if (i) s += ", ";
        s += to_string(a.target) + " := " + std::to_string(a.value);
      }
      s += "] " + print_operand(f.body());
      return s;
    }
  }
  return {};
}

}  // namespace detail

inline Formula parse(std::string_view text) { return detail::FormulaParser(text).parse_all(); }

// Parses a formula that must not contain interventions.
inline Formula parse_event(std::string_view text) {
  Formula f = parse(text);
  if (!f.is_event()) throw SyntaxError("expected an event, found an intervention formula", 0);
  return f;
}

// Canonical text. Binary connectives are parenthesized except at the top
// level and directly under a modality.
inline std::string print(const Formula& f) {
  if (f.is_binary()) return "(" + detail::print_inner(f, true) + ")";
  return detail::print_inner(f, true);
}

// Parses "X@w=v & Y@u=v'" into its conjuncts, in order.
inline std::vector<Assignment> parse_conjunction(std::string_view text) {
  Formula f = parse(text);
  std::vector<Assignment> out;
  std::vector<Formula> leaves;
  // Left-to-right flattening of the &-tree.
  auto flatten = [&](auto&& self, const Formula& g) -> void {
    if (g.op() == Op::And) {
      self(self, g.lhs());
      self(self, g.rhs());
    } else {
      leaves.push_back(g);
    }
  };
  flatten(flatten, f);
  for (const auto& leaf : leaves) {
    if (leaf.op() != Op::GlobalAtom)
      throw SyntaxError("conjunction must consist of X@w=v atoms, found '" + print(leaf) + "'", 0);
    out.push_back({{leaf.variable(), leaf.world()}, leaf.value()});
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j)
      if (out[i].target == out[j].target)
        throw SyntaxError("conjunction mentions " + to_string(out[i].target) + " twice", 0);
  return out;
}

inline std::string print_conjunction(const std::vector<Assignment>& conj) {
  std::string s;
  for (std::size_t i = 0; i < conj.size(); ++i) {
    if (i) s += " & ";
    s += to_string(conj[i]);
  }
  return s;
}

}  // namespace causalmk
