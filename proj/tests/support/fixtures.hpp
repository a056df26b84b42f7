#pragma once

// Small models built in code, independent of the model file reader.

#include <map>
#include <string>
#include <vector>

#include "causalmk/model.hpp"
#include "causalmk/parser.hpp"
#include "causalmk/semantics.hpp"

namespace fixtures {

using namespace causalmk;

inline std::vector<std::string> worlds(int n, int first = 0) {
  std::vector<std::string> w;
  for (int i = 0; i < n; ++i) w.push_back("w" + std::to_string(first + i));
  return w;
}

// Exogenous variables are copied into endogenous ones by equations of the
// form X = (U=1).
inline Equation copy_of(const std::string& exo) { return FormulaEquation{parse_event(exo + "=1")}; }

// Four worlds, w0 sees the other three; p=U1, r=U2, q=dia(p=1 & r=1).
inline Setting umbrella() {
  Signature sig;
  sig.add_exogenous("U1", {0, 1}).add_exogenous("U2", {0, 1});
  sig.add_endogenous("p", {0, 1}).add_endogenous("q", {0, 1}).add_endogenous("r", {0, 1});
  auto ws = worlds(4);
  std::map<PairRef, Equation> eqs;
  for (const auto& w : ws) {
    eqs[{"p", w}] = copy_of("U1");
    eqs[{"r", w}] = copy_of("U2");
    eqs[{"q", w}] = FormulaEquation{parse_event("dia(p=1 & r=1)")};
  }
  Model m = build_model(sig, ws, {{"w0", "w1"}, {"w0", "w2"}, {"w0", "w3"}}, eqs);
  int u1[] = {0, 0, 1, 1};
  int u2[] = {0, 1, 0, 1};
  std::map<PairRef, Value> ctx;
  for (int i = 0; i < 4; ++i) {
    ctx[{"U1", ws[i]}] = u1[i];
    ctx[{"U2", ws[i]}] = u2[i];
  }
  Context c(m, ctx);
  return Setting(std::move(m), std::move(c));
}

// Three worlds, w0 sees w1 and w2; r = !(p=1) & q=1 & box(p=1).
inline Setting stalemate() {
  Signature sig;
  sig.add_exogenous("U1", {0, 1}).add_exogenous("U2", {0, 1});
  sig.add_endogenous("p", {0, 1}).add_endogenous("q", {0, 1}).add_endogenous("r", {0, 1});
  auto ws = worlds(3);
  std::map<PairRef, Equation> eqs;
  for (const auto& w : ws) {
    eqs[{"p", w}] = copy_of("U1");
    eqs[{"q", w}] = copy_of("U2");
    eqs[{"r", w}] = FormulaEquation{parse_event("!(p=1) & q=1 & box(p=1)")};
  }
  Model m = build_model(sig, ws, {{"w0", "w1"}, {"w0", "w2"}}, eqs);
  int u1[] = {0, 1, 1};
  int u2[] = {1, 1, 0};
  std::map<PairRef, Value> ctx;
  for (int i = 0; i < 3; ++i) {
    ctx[{"U1", ws[i]}] = u1[i];
    ctx[{"U2", ws[i]}] = u2[i];
  }
  Context c(m, ctx);
  return Setting(std::move(m), std::move(c));
}

}  // namespace fixtures
