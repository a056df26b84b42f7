#pragma once

// Translates oracle models and events into library objects.

#include <map>
#include <string>
#include <vector>

#include "causalmk/cause.hpp"
#include "causalmk/model.hpp"
#include "causalmk/parser.hpp"
#include "causalmk/semantics.hpp"
#include "support/classical_oracle.hpp"

namespace oracle {

inline std::string endo_name(int i) { return "X" + std::to_string(i); }
inline std::string exo_name(int k) { return "E" + std::to_string(k); }

inline std::string to_text(const Expr& e) {
  switch (e.kind) {
    case Expr::atom: return endo_name(e.var) + "=" + std::to_string(e.value);
    case Expr::neg: return "!(" + to_text(*e.a) + ")";
    case Expr::conj: return "(" + to_text(*e.a) + " & " + to_text(*e.b) + ")";
    case Expr::disj: return "(" + to_text(*e.a) + " | " + to_text(*e.b) + ")";
  }
  return "";
}

inline causalmk::Setting to_setting(const Sem& m) {
  using namespace causalmk;
  Signature sig;
  for (int k = 0; k < m.exogenous; ++k) sig.add_exogenous(exo_name(k), {0, 1});
  for (int i = 0; i < m.size(); ++i) sig.add_endogenous(endo_name(i), {0, 1});
  std::map<PairRef, Equation> eqs;
  for (int i = 0; i < m.size(); ++i) {
    TableEquation t;
    for (int p : m.parents[i]) t.parents.push_back({p >= 0 ? endo_name(p) : exo_name(-1 - p), "w"});
    std::size_t k = m.parents[i].size();
    for (std::size_t row = 0; row < m.tables[i].size(); ++row) {
      std::vector<Value> key(k);
      for (std::size_t j = 0; j < k; ++j) key[j] = static_cast<Value>(row >> (k - 1 - j) & 1);
      t.rows[key] = m.tables[i][row];
    }
    eqs[{endo_name(i), "w"}] = t;
  }
  Model model = build_model(sig, {"w"}, {}, eqs);
  std::map<PairRef, Value> ctx;
  for (int k = 0; k < m.exogenous; ++k) ctx[{exo_name(k), "w"}] = m.context[k];
  Context c(model, ctx);
  return Setting(std::move(model), std::move(c));
}

inline causalmk::Conjunction to_conjunction(const std::vector<Literal>& x) {
  causalmk::Conjunction out;
  for (const auto& l : x) out.push_back({{endo_name(l.var), "w"}, l.value});
  return out;
}

}  // namespace oracle
