#pragma once

/*
 * Actual causes in causal Kripke settings under the original, updated and
 * modified definitions.
 *
 * A CauseQuery fixes (setting, world, event) and answers any number of
 * candidate questions against it. The search only ranges over the
 * endogenous pairs the event can depend on (the event's read set closed
 * under declared parents): intervening on any other pair cannot change the
 * event, so contingency sets and restored sets outside that universe never
 * change a verdict. Event truth under an intervention on the universe is
 * memoized.
 *
 * Search order: contingency sets by increasing size, then lexicographically
 * over the universe order (world name, variable name); settings
 * lexicographically over each range. The first witness found is reported.
 *
 * The AC2b guard ("if z* holds ...") is always met because z* is read off
 * the actual valuation.
 */

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "causalmk/error.hpp"
#include "causalmk/formula.hpp"
#include "causalmk/model.hpp"
#include "causalmk/parser.hpp"
#include "causalmk/semantics.hpp"

namespace causalmk {

enum class Definition { original, updated, modified };

inline constexpr Definition kAllDefinitions[] = {Definition::original, Definition::updated, Definition::modified};

inline std::string to_string(Definition d) {
  switch (d) {
    case Definition::original:
      return "original";
    case Definition::updated:
      return "updated";
    case Definition::modified:
      return "modified";
  }
  return "?";
}

inline std::optional<Definition> parse_definition(std::string_view s) {
  if (s == "original" || s == "o") return Definition::original;
  if (s == "updated" || s == "u") return Definition::updated;
  if (s == "modified" || s == "m") return Definition::modified;
  return std::nullopt;
}

using Conjunction = std::vector<Assignment>;

struct Witness {
  std::vector<Assignment> contingency;  // N = n (actual values under the modified definition)
  std::vector<Assignment> alternative;  // Y = y'
  std::vector<Assignment> fixed;        // Z = z*, every endogenous pair outside N (original/updated)
};

enum class ClauseStatus { pass, fail, not_checked, inconclusive };
enum class Outcome { holds, fails, inconclusive };

inline std::string to_string(ClauseStatus c) {
  switch (c) {
    case ClauseStatus::pass:
      return "pass";
    case ClauseStatus::fail:
      return "fail";
    case ClauseStatus::not_checked:
      return "not checked";
    case ClauseStatus::inconclusive:
      return "inconclusive";
  }
  return "?";
}

inline std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::holds:
      return "holds";
    case Outcome::fails:
      return "fails";
    case Outcome::inconclusive:
      return "inconclusive";
  }
  return "?";
}

struct SearchStats {
  std::uint64_t evaluations = 0;
  std::size_t universe = 0;           // relevant endogenous pairs
  std::size_t contingency_limit = 0;  // largest |N| searched
};

struct CauseVerdict {
  Outcome outcome = Outcome::fails;
  Definition definition = Definition::original;
  ClauseStatus ac1 = ClauseStatus::not_checked;
  ClauseStatus ac2 = ClauseStatus::not_checked;
  ClauseStatus ac3 = ClauseStatus::not_checked;
  std::optional<Witness> witness;
  std::optional<Conjunction> smaller_cause;  // strict sub-conjunction that violates AC3
  std::string reason;
  SearchStats stats;

  bool holds() const { return outcome == Outcome::holds; }
  bool inconclusive() const { return outcome == Outcome::inconclusive; }
};

struct SearchOptions {
  // Cap on |N|. Required once the universe exceeds exhaustive_limit.
  std::optional<std::size_t> max_contingency;
  // Cap on event evaluations per query; 0 means unlimited.
  std::uint64_t max_evaluations = 0;
  std::size_t exhaustive_limit = 16;
};

class CauseQuery {
 public:
  CauseQuery(const Setting& setting, std::string_view world, const Formula& event, SearchOptions options = {})
      : CauseQuery(setting, setting.model().world_index(world), event, options) {}

  CauseQuery(const Setting& setting, std::size_t world, const Formula& event, SearchOptions options = {})
      : setting_(setting), model_(setting.model()), world_(world), options_(options) {
    if (!event.is_event()) throw DeclarationError("the effect must be an event (no interventions)");
    event_ = model_.compile(event);
    event_holds_ = satisfies(setting_, world_, event_);
    direct_reads_ = model_.read_set(event_, world_);
    universe_ = model_.endogenous_ancestors(direct_reads_);
    position_.assign(model_.node_count(), -1);
    for (std::size_t i = 0; i < universe_.size(); ++i) position_[universe_[i]] = static_cast<int>(i);
    actual_code_.resize(universe_.size());
    for (std::size_t i = 0; i < universe_.size(); ++i)
      actual_code_[i] = static_cast<std::uint8_t>(
          model_.range_position(universe_[i], setting_.valuation()[universe_[i]]) + 1);
    setup_memo();
  }

  const Setting& setting() const { return setting_; }
  std::size_t world() const { return world_; }
  bool event_holds() const { return event_holds_; }

  // Endogenous pairs that can influence the event, in search order.
  std::vector<PairRef> universe() const {
    std::vector<PairRef> out;
    for (NodeId n : universe_) out.push_back(model_.pair(n));
    return out;
  }

  // Endogenous pairs the event reads directly. Their actual values are
  // trivially causes of the event.
  std::vector<PairRef> trivial_pairs() const {
    std::vector<PairRef> out;
    for (NodeId n : direct_reads_)
      if (model_.is_endogenous(n)) out.push_back(model_.pair(n));
    return out;
  }

  std::uint64_t evaluations() const { return evaluations_; }

  // AC1: the event holds at the world and each conjunct has its actual value.
  bool check_ac1(const Conjunction& candidate) const {
    if (!event_holds_) return false;
    for (const auto& a : candidate)
      if (setting_.valuation()[model_.node(a.target)] != a.value) return false;
    return true;
  }

  CauseVerdict is_cause(const Conjunction& candidate, Definition def) {
    CauseVerdict v;
    v.definition = def;
    std::vector<NodeId> nodes = validate(candidate);
    std::uint64_t start = evaluations_;
    auto finish = [&](CauseVerdict& out) -> CauseVerdict {
      out.stats.evaluations = evaluations_ - start;
      out.stats.universe = universe_.size();
      out.stats.contingency_limit = contingency_limit(nodes.size());
      return out;
    };

    if (!check_ac1(candidate)) {
      v.ac1 = ClauseStatus::fail;
      v.outcome = Outcome::fails;
      v.reason = event_holds_ ? "AC1 fails: a conjunct differs from its actual value"
                              : "AC1 fails: the event does not hold at " + model_.worlds()[world_];
      return finish(v);
    }
    v.ac1 = ClauseStatus::pass;
    if (auto why = over_limit()) {
      v.ac2 = ClauseStatus::inconclusive;
      v.outcome = Outcome::inconclusive;
      v.reason = *why;
      return finish(v);
    }

    std::vector<int> relevant;
    for (NodeId n : nodes)
      if (position_[n] >= 0) relevant.push_back(position_[n]);
    std::sort(relevant.begin(), relevant.end());
    if (relevant.empty()) {
      v.ac2 = ClauseStatus::fail;
      v.outcome = Outcome::fails;
      v.reason = "AC2 fails: no conjunct can influence the event";
      return finish(v);
    }

    try {
      Ac2Result r = search_ac2(relevant, def);
      if (r.status == Ac2Status::truncated) {
        v.ac2 = ClauseStatus::inconclusive;
        v.outcome = Outcome::inconclusive;
        v.reason = "no witness with |N| <= " + std::to_string(contingency_limit(relevant.size())) +
                   "; larger contingency sets were not searched";
        return finish(v);
      }
      if (r.status == Ac2Status::none) {
        v.ac2 = ClauseStatus::fail;
        v.outcome = Outcome::fails;
        v.reason = "AC2 fails: no witness exists (exhaustive over " + std::to_string(universe_.size()) +
                   " relevant pairs)";
        return finish(v);
      }
      v.ac2 = ClauseStatus::pass;
      if (relevant.size() < nodes.size()) {
        v.ac3 = ClauseStatus::fail;
        v.outcome = Outcome::fails;
        v.smaller_cause = conjunction_of(relevant);
        v.reason = "AC3 fails: conjuncts that cannot influence the event are redundant";
        return finish(v);
      }
      v.witness = make_witness(r, def);
      // AC3: no strict nonempty sub-conjunction satisfies AC2.
      bool unknown = false;
      std::size_t k = relevant.size();
      for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << k); ++mask) {
        std::vector<int> sub;
        for (std::size_t i = 0; i < k; ++i)
          if (mask >> i & 1) sub.push_back(relevant[i]);
        Ac2Result s = search_ac2(sub, def);
        if (s.status == Ac2Status::found) {
          v.ac3 = ClauseStatus::fail;
          v.outcome = Outcome::fails;
          v.smaller_cause = conjunction_of(sub);
          v.reason = "AC3 fails: " + print_conjunction(*v.smaller_cause) + " already satisfies AC1 and AC2";
          return finish(v);
        }
        if (s.status == Ac2Status::truncated) unknown = true;
      }
      if (unknown) {
        v.ac3 = ClauseStatus::inconclusive;
        v.outcome = Outcome::inconclusive;
        v.reason = "minimality unknown: a sub-conjunction was not searched exhaustively";
        return finish(v);
      }
      v.ac3 = ClauseStatus::pass;
      v.outcome = Outcome::holds;
      return finish(v);
    } catch (const BudgetHit&) {
      if (v.ac2 == ClauseStatus::not_checked) v.ac2 = ClauseStatus::inconclusive;
      else v.ac3 = ClauseStatus::inconclusive;
      v.outcome = Outcome::inconclusive;
      v.reason = "evaluation budget of " + std::to_string(options_.max_evaluations) + " exhausted";
      return finish(v);
    }
  }

  // All causes with at most max_conjuncts conjuncts, by size and then
  // lexicographically. Unless include_trivial is set, candidates that
  // mention a pair the event reads directly are skipped.
  std::vector<Conjunction> find_causes(Definition def, std::size_t max_conjuncts, bool include_trivial = false) {
    if (max_conjuncts == 0) throw DeclarationError("max_conjuncts must be at least 1");
    if (!event_holds_) return {};
    if (auto why = over_limit()) throw SearchBudgetExceeded(*why);
    std::vector<int> pool;
    for (std::size_t i = 0; i < universe_.size(); ++i)
      if (include_trivial || !std::binary_search(direct_reads_.begin(), direct_reads_.end(), universe_[i]))
        pool.push_back(static_cast<int>(i));
    if (pool.size() > 63) throw SearchBudgetExceeded("candidate pool above 63 pairs");

    std::vector<std::uint64_t> passing;
    std::vector<Conjunction> causes;
    std::size_t limit = std::min(max_conjuncts, pool.size());
    try {
      for (std::size_t k = 1; k <= limit; ++k) {
        std::vector<std::size_t> idx(k);
        for (std::size_t i = 0; i < k; ++i) idx[i] = i;
        while (true) {
          std::uint64_t mask = 0;
          std::vector<int> ypos;
          for (std::size_t i : idx) {
            mask |= std::uint64_t{1} << i;
            ypos.push_back(pool[i]);
          }
          bool has_smaller = std::any_of(passing.begin(), passing.end(),
                                         [&](std::uint64_t p) { return (p & mask) == p; });
          if (!has_smaller) {
            Ac2Result r = search_ac2(ypos, def);
            if (r.status == Ac2Status::truncated)
              throw SearchBudgetExceeded("contingency cap reached while checking " +
                                         print_conjunction(conjunction_of(ypos)));
            if (r.status == Ac2Status::found) {
              passing.push_back(mask);
              causes.push_back(conjunction_of(ypos));
            }
          }
          if (!next_combination(idx, pool.size())) break;
        }
      }
    } catch (const BudgetHit&) {
      throw SearchBudgetExceeded("evaluation budget of " + std::to_string(options_.max_evaluations) + " exhausted");
    }
    return causes;
  }

  // True iff some cause (up to max_conjuncts, default unbounded) has the
  // atom as a conjunct. Trivial candidates are included.
  bool part_of_cause(const Assignment& atom, Definition def, std::optional<std::size_t> max_conjuncts = {}) {
    NodeId n = model_.node(atom.target);
    if (!model_.is_endogenous(n)) throw DeclarationError(to_string(atom.target) + " is exogenous");
    if (setting_.valuation()[n] != atom.value || !event_holds_ || position_[n] < 0) return false;
    std::size_t limit = max_conjuncts.value_or(universe_.size());
    auto key = std::make_pair(def, limit);
    auto it = cause_cache_.find(key);
    if (it == cause_cache_.end()) it = cause_cache_.emplace(key, find_causes(def, limit, true)).first;
    for (const auto& cause : it->second)
      if (std::find(cause.begin(), cause.end(), atom) != cause.end()) return true;
    return false;
  }

 private:
  struct BudgetHit {};
  enum class Ac2Status { found, none, truncated };
  struct Ac2Result {
    Ac2Status status = Ac2Status::none;
    std::vector<int> y;            // universe positions of the candidate
    std::vector<std::uint8_t> y_alt;  // range position + 1 per candidate pair
    std::vector<int> n;            // contingency positions
    std::vector<std::uint8_t> n_val;
  };

  std::vector<NodeId> validate(const Conjunction& candidate) const {
    if (candidate.empty()) throw DeclarationError("a candidate cause needs at least one conjunct");
    std::vector<NodeId> nodes;
    for (const auto& a : candidate) {
      NodeId n = model_.node(a.target);
      if (!model_.is_endogenous(n)) throw DeclarationError("candidate conjunct " + to_string(a) + " is exogenous");
      if (!detail::in_range(model_.range(n), a.value))
        throw RangeError("candidate value " + std::to_string(a.value) + " outside the range of " + to_string(a.target));
      if (std::find(nodes.begin(), nodes.end(), n) != nodes.end())
        throw DeclarationError("candidate mentions " + to_string(a.target) + " twice");
      nodes.push_back(n);
    }
    return nodes;
  }

  std::optional<std::string> over_limit() const {
    if (universe_.size() > options_.exhaustive_limit && !options_.max_contingency)
      return "the event depends on " + std::to_string(universe_.size()) + " pairs, above the exhaustive limit of " +
             std::to_string(options_.exhaustive_limit) + "; set a contingency cap";
    return std::nullopt;
  }

  std::size_t contingency_limit(std::size_t candidate_size) const {
    std::size_t others = universe_.size() >= candidate_size ? universe_.size() - candidate_size : 0;
    if (options_.max_contingency) return std::min(*options_.max_contingency, others);
    return others;
  }

  Conjunction conjunction_of(const std::vector<int>& positions) const {
    Conjunction c;
    for (int p : positions) c.push_back({model_.pair(universe_[p]), setting_.valuation()[universe_[p]]});
    return c;
  }

  static bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
    std::size_t k = idx.size();
    for (std::size_t i = k; i-- > 0;) {
      if (idx[i] < n - k + i) {
        ++idx[i];
        for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
        return true;
      }
    }
    return false;
  }

  // Advances codes (range position + 1) over `positions` like an odometer.
  bool next_setting(std::vector<std::uint8_t>& code, const std::vector<int>& positions) const {
    for (std::size_t i = positions.size(); i-- > 0;) {
      int p = positions[i];
      if (code[p] < model_.range(universe_[p]).size()) {
        ++code[p];
        return true;
      }
      code[p] = 1;
    }
    return false;
  }

  void setup_memo() {
    std::uint64_t size = 1;
    dense_ = true;
    strides_.resize(universe_.size());
    for (std::size_t i = 0; i < universe_.size(); ++i) {
      strides_[i] = size;
      std::uint64_t base = model_.range(universe_[i]).size() + 1;
      if (size > (std::uint64_t{1} << 22) / base) {
        dense_ = false;
        break;
      }
      size *= base;
    }
    if (dense_) dense_memo_.assign(size, -1);
    forced_.assign(model_.node_count(), kUnset);
  }

  // Event truth at the query world with every universe pair either free
  // (code 0) or forced to the code-th value of its range.
  bool truth(const std::vector<std::uint8_t>& code) {
    std::int8_t* slot = nullptr;
    if (dense_) {
      std::uint64_t key = 0;
      for (std::size_t i = 0; i < code.size(); ++i) key += code[i] * strides_[i];
      slot = &dense_memo_[key];
      if (*slot >= 0) return *slot != 0;
    } else {
      std::string key(code.begin(), code.end());
      auto it = sparse_memo_.find(key);
      if (it != sparse_memo_.end()) return it->second;
      bool r = compute_truth(code);
      sparse_memo_.emplace(std::move(key), r);
      return r;
    }
    bool r = compute_truth(code);
    *slot = r ? 1 : 0;
    return r;
  }

  bool compute_truth(const std::vector<std::uint8_t>& code) {
    if (options_.max_evaluations && evaluations_ >= options_.max_evaluations) throw BudgetHit{};
    ++evaluations_;
    for (std::size_t i = 0; i < code.size(); ++i)
      forced_[universe_[i]] = code[i] ? model_.range(universe_[i])[code[i] - 1] : kUnset;
    model_.evaluate_into(setting_.context().values(), forced_, scratch_);
    return model_.holds(event_, world_, scratch_, setting_.context().values());
  }

  Ac2Result search_ac2(const std::vector<int>& ypos, Definition def) {
    std::vector<bool> in_y(universe_.size(), false);
    for (int p : ypos) in_y[p] = true;
    std::vector<int> others;
    for (std::size_t i = 0; i < universe_.size(); ++i)
      if (!in_y[i]) others.push_back(static_cast<int>(i));
    std::size_t limit = others.size();
    bool truncated = false;
    if (options_.max_contingency && *options_.max_contingency < limit) {
      limit = *options_.max_contingency;
      truncated = true;
    }

    std::vector<std::uint8_t> code(universe_.size(), 0);
    for (std::size_t k = 0; k <= limit; ++k) {
      std::vector<std::size_t> idx(k);
      for (std::size_t i = 0; i < k; ++i) idx[i] = i;
      while (true) {
        std::vector<int> npos;
        for (std::size_t i : idx) npos.push_back(others[i]);
        if (auto r = try_contingency(ypos, npos, others, def, code)) return *r;
        if (!next_combination(idx, others.size())) break;
      }
    }
    Ac2Result none;
    none.status = truncated ? Ac2Status::truncated : Ac2Status::none;
    return none;
  }

  std::optional<Ac2Result> try_contingency(const std::vector<int>& ypos, const std::vector<int>& npos,
                                           const std::vector<int>& others, Definition def,
                                           std::vector<std::uint8_t>& code) {
    auto clear = [&] { std::fill(code.begin(), code.end(), 0); };
    // Finds y' with the event false under the current N setting.
    auto find_alternative = [&]() -> std::optional<std::vector<std::uint8_t>> {
      for (int p : ypos) code[p] = 1;
      do {
        if (!truth(code)) {
          std::vector<std::uint8_t> alt;
          for (int p : ypos) alt.push_back(code[p]);
          return alt;
        }
      } while (next_setting(code, ypos));
      return std::nullopt;
    };

    if (def == Definition::modified) {
      clear();
      for (int p : npos) code[p] = actual_code_[p];
      auto alt = find_alternative();
      clear();
      if (!alt) return std::nullopt;
      Ac2Result r{Ac2Status::found, ypos, *alt, npos, {}};
      for (int p : npos) r.n_val.push_back(actual_code_[p]);
      return r;
    }

    std::vector<bool> in_n(universe_.size(), false);
    for (int p : npos) in_n[p] = true;
    std::vector<int> zpos;
    for (int p : others)
      if (!in_n[p]) zpos.push_back(p);

    std::vector<std::uint8_t> nset(universe_.size(), 0);
    for (int p : npos) nset[p] = 1;
    do {
      clear();
      for (int p : npos) code[p] = nset[p];
      auto alt = find_alternative();
      if (!alt) continue;
      if (restoration_holds(ypos, npos, zpos, nset, def == Definition::updated, code)) {
        clear();
        Ac2Result r{Ac2Status::found, ypos, *alt, npos, {}};
        for (int p : npos) r.n_val.push_back(nset[p]);
        return r;
      }
    } while (next_setting(nset, npos));
    clear();
    return std::nullopt;
  }

  // AC2b: [Y <- y, N' <- n, Z' <- z*] event for every Z' within zpos and
  // N' = N (original) or every N' within N (updated).
  bool restoration_holds(const std::vector<int>& ypos, const std::vector<int>& npos, const std::vector<int>& zpos,
                         const std::vector<std::uint8_t>& nset, bool all_n_subsets, std::vector<std::uint8_t>& code) {
    std::uint64_t n_masks = all_n_subsets ? (std::uint64_t{1} << npos.size()) : 1;
    std::uint64_t z_masks = std::uint64_t{1} << zpos.size();
    for (std::uint64_t nm = 0; nm < n_masks; ++nm) {
      for (std::uint64_t zm = 0; zm < z_masks; ++zm) {
        std::fill(code.begin(), code.end(), 0);
        for (int p : ypos) code[p] = actual_code_[p];
        for (std::size_t i = 0; i < npos.size(); ++i) {
          // Original: the full N. Updated: bit i of nm clear keeps N[i] set,
          // so nm = 0 is the full N.
          bool keep = !all_n_subsets || !(nm >> i & 1);
          if (keep) code[npos[i]] = nset[npos[i]];
        }
        for (std::size_t i = 0; i < zpos.size(); ++i)
          if (zm >> i & 1) code[zpos[i]] = actual_code_[zpos[i]];
        if (!truth(code)) return false;
      }
    }
    return true;
  }

  Witness make_witness(const Ac2Result& r, Definition def) const {
    Witness w;
    std::vector<bool> in_n(model_.node_count(), false);
    for (std::size_t i = 0; i < r.n.size(); ++i) {
      NodeId n = universe_[r.n[i]];
      in_n[n] = true;
      w.contingency.push_back({model_.pair(n), model_.range(n)[r.n_val[i] - 1]});
    }
    for (std::size_t i = 0; i < r.y.size(); ++i) {
      NodeId n = universe_[r.y[i]];
      w.alternative.push_back({model_.pair(n), model_.range(n)[r.y_alt[i] - 1]});
    }
    if (def != Definition::modified)
      for (NodeId n : model_.endogenous_nodes())
        if (!in_n[n]) w.fixed.push_back({model_.pair(n), setting_.valuation()[n]});
    return w;
  }

  const Setting& setting_;
  const Model& model_;
  std::size_t world_;
  SearchOptions options_;
  CompiledFormula event_;
  bool event_holds_ = false;
  std::vector<NodeId> direct_reads_;
  std::vector<NodeId> universe_;
  std::vector<int> position_;
  std::vector<std::uint8_t> actual_code_;

  bool dense_ = true;
  std::vector<std::uint64_t> strides_;
  std::vector<std::int8_t> dense_memo_;
  std::unordered_map<std::string, bool> sparse_memo_;
  std::vector<Value> forced_;
  std::vector<Value> scratch_;
  std::uint64_t evaluations_ = 0;
  std::map<std::pair<Definition, std::size_t>, std::vector<Conjunction>> cause_cache_;
};

// ---------------------------------------------------------------------------
// Single-witness checks. These evaluate directly on the full model, without
// the relevance pruning or memoization of CauseQuery, so they can re-verify
// what the search reports.

namespace detail {

struct DirectChecker {
  DirectChecker(const Setting& s, std::string_view world, const Formula& event)
      : setting(s), model(s.model()), w(model.world_index(world)) {
    if (!event.is_event()) throw DeclarationError("the effect must be an event (no interventions)");
    compiled = model.compile(event);
  }

  bool holds_under(const std::vector<std::pair<NodeId, Value>>& forced) const {
    std::vector<Value> f(model.node_count(), kUnset);
    for (const auto& [n, v] : forced) f[n] = v;
    std::vector<Value> val;
    model.evaluate_into(setting.context().values(), f, val);
    return model.holds(compiled, w, val, setting.context().values());
  }

  std::vector<std::pair<NodeId, Value>> resolve(const std::vector<Assignment>& as) const {
    std::vector<std::pair<NodeId, Value>> out;
    for (const auto& a : as) {
      NodeId n = model.node(a.target);
      if (!model.is_endogenous(n)) throw DeclarationError(to_string(a.target) + " is exogenous");
      if (!in_range(model.range(n), a.value))
        throw RangeError("value " + std::to_string(a.value) + " outside the range of " + to_string(a.target));
      out.emplace_back(n, a.value);
    }
    return out;
  }

  // Checks the witness shape and returns (Y <- y, Y <- y', N <- n).
  void shape(const Conjunction& candidate, const Witness& witness, std::vector<std::pair<NodeId, Value>>& y,
             std::vector<std::pair<NodeId, Value>>& alt, std::vector<std::pair<NodeId, Value>>& n) const {
    y = resolve(candidate);
    alt = resolve(witness.alternative);
    n = resolve(witness.contingency);
    auto targets = [](const std::vector<std::pair<NodeId, Value>>& v) {
      std::vector<NodeId> t;
      for (const auto& [node, val] : v) t.push_back(node);
      std::sort(t.begin(), t.end());
      return t;
    };
    if (targets(y) != targets(alt)) throw DeclarationError("witness alternative must set exactly the candidate pairs");
    auto ty = targets(y);
    for (NodeId m : targets(n))
      if (std::binary_search(ty.begin(), ty.end(), m))
        throw DeclarationError("contingency set overlaps the candidate at " + model.name(m));
  }

  const Setting& setting;
  const Model& model;
  std::size_t w;
  CompiledFormula compiled;
};

inline bool restoration_direct(const DirectChecker& c, const Conjunction& candidate, const Witness& witness,
                               bool all_n_subsets) {
  std::vector<std::pair<NodeId, Value>> y, alt, n;
  c.shape(candidate, witness, y, alt, n);
  std::vector<bool> taken(c.model.node_count(), false);
  for (const auto& [m, v] : y) taken[m] = true;
  for (const auto& [m, v] : n) taken[m] = true;
  std::vector<NodeId> z;  // Z \ Y
  for (NodeId m : c.model.endogenous_nodes())
    if (!taken[m]) z.push_back(m);
  if (z.size() > 24 || (all_n_subsets && z.size() + n.size() > 24))
    throw SearchBudgetExceeded("too many pairs to enumerate every restoration subset");
  std::uint64_t n_masks = all_n_subsets ? (std::uint64_t{1} << n.size()) : 1;
  for (std::uint64_t nm = 0; nm < n_masks; ++nm)
    for (std::uint64_t zm = 0; zm < (std::uint64_t{1} << z.size()); ++zm) {
      std::vector<std::pair<NodeId, Value>> forced = y;
      for (std::size_t i = 0; i < n.size(); ++i)
        if (!(nm >> i & 1)) forced.push_back(n[i]);
      for (std::size_t i = 0; i < z.size(); ++i)
        if (zm >> i & 1) forced.emplace_back(z[i], c.setting.valuation()[z[i]]);
      if (!c.holds_under(forced)) return false;
    }
  return true;
}

}  // namespace detail

inline bool check_ac1(const Setting& s, std::string_view world, const Conjunction& candidate, const Formula& event) {
  detail::DirectChecker c(s, world, event);
  if (!satisfies(s, c.w, c.compiled)) return false;
  for (const auto& [n, v] : c.resolve(candidate))
    if (s.valuation()[n] != v) return false;
  return true;
}

// [Y <- y', N <- n] !event at the world.
inline bool check_ac2a(const Setting& s, std::string_view world, const Conjunction& candidate, const Formula& event,
                       const Witness& witness) {
  detail::DirectChecker c(s, world, event);
  std::vector<std::pair<NodeId, Value>> y, alt, n;
  c.shape(candidate, witness, y, alt, n);
  auto forced = alt;
  forced.insert(forced.end(), n.begin(), n.end());
  return !c.holds_under(forced);
}

// For every Z' within Z \ Y: [Y <- y, N <- n, Z' <- z*] event, where Z is
// every endogenous pair outside N.
inline bool check_ac2b_original(const Setting& s, std::string_view world, const Conjunction& candidate,
                                const Formula& event, const Witness& witness) {
  detail::DirectChecker c(s, world, event);
  return detail::restoration_direct(c, candidate, witness, false);
}

// As check_ac2b_original, additionally over every N' within N.
inline bool check_ac2b_updated(const Setting& s, std::string_view world, const Conjunction& candidate,
                               const Formula& event, const Witness& witness) {
  detail::DirectChecker c(s, world, event);
  return detail::restoration_direct(c, candidate, witness, true);
}

// [Y <- y', N <- n*] !event with n* the actual values of N.
inline bool check_ac2a_modified(const Setting& s, std::string_view world, const Conjunction& candidate,
                                const Formula& event, const std::vector<PairRef>& contingency,
                                const std::vector<Value>& alternative) {
  if (alternative.size() != candidate.size())
    throw DeclarationError("alternative setting must give one value per conjunct");
  Witness w;
  for (std::size_t i = 0; i < candidate.size(); ++i) w.alternative.push_back({candidate[i].target, alternative[i]});
  for (const auto& p : contingency) w.contingency.push_back({p, s.valuation()[s.model().node(p)]});
  return check_ac2a(s, world, candidate, event, w);
}

inline CauseVerdict is_cause(const Setting& s, std::string_view world, const Conjunction& candidate,
                             const Formula& event, Definition def, SearchOptions options = {}) {
  CauseQuery q(s, world, event, options);
  return q.is_cause(candidate, def);
}

inline std::vector<Conjunction> find_causes(const Setting& s, std::string_view world, const Formula& event,
                                            Definition def, std::size_t max_conjuncts, bool include_trivial = false,
                                            SearchOptions options = {}) {
  CauseQuery q(s, world, event, options);
  return q.find_causes(def, max_conjuncts, include_trivial);
}

inline bool part_of_cause(const Setting& s, std::string_view world, const Assignment& atom, const Formula& event,
                          Definition def, std::optional<std::size_t> max_conjuncts = {}, SearchOptions options = {}) {
  CauseQuery q(s, world, event, options);
  return q.part_of_cause(atom, def, max_conjuncts);
}

namespace detail {
inline bool require_conclusive(const CauseVerdict& v) {
  if (v.inconclusive()) throw SearchBudgetExceeded(v.reason);
  return v.holds();
}
}  // namespace detail

// {(X,w')=x | w R w' and X=x holds at w'}; empty when nothing qualifies.
inline Conjunction possibility_conjunction(const Setting& s, std::string_view world, std::string_view variable,
                                           Value value) {
  const Model& m = s.model();
  std::size_t w = m.world_index(world);
  std::size_t v = m.variable_index(variable);
  if (!m.is_endogenous_variable(v)) throw DeclarationError(std::string(variable) + " is exogenous");
  Conjunction out;
  for (std::size_t succ : m.successors(w))
    if (s.valuation()[m.node(v, succ)] == value) out.push_back({{m.variables()[v], m.worlds()[succ]}, value});
  return out;
}

// "The possibility of X=x" is a cause: the conjunction over qualifying
// successors is a cause under the modified definition. False when no
// successor qualifies.
inline bool possibility_is_cause(const Setting& s, std::string_view world, std::string_view variable, Value value,
                                 const Formula& event, SearchOptions options = {}) {
  Conjunction conj = possibility_conjunction(s, world, variable, value);
  if (conj.empty()) return false;
  return detail::require_conclusive(is_cause(s, world, conj, event, Definition::modified, options));
}

// "The certainty of X=x" is a cause: (X,w')=x is a modified cause for every
// successor w'. False when the world has no successors.
inline bool certainty_is_cause(const Setting& s, std::string_view world, std::string_view variable, Value value,
                               const Formula& event, SearchOptions options = {}) {
  const Model& m = s.model();
  std::size_t w = m.world_index(world);
  if (!m.is_endogenous_variable(m.variable_index(variable)))
    throw DeclarationError(std::string(variable) + " is exogenous");
  if (m.successors(w).empty()) return false;
  CauseQuery q(s, world, event, options);
  for (std::size_t succ : m.successors(w)) {
    Conjunction single{{{std::string(variable), m.worlds()[succ]}, value}};
    if (!detail::require_conclusive(q.is_cause(single, Definition::modified))) return false;
  }
  return true;
}

enum class Modality { box, dia };

// box: the candidate is a cause at every successor; dia: at some successor.
inline bool modal_cause_check(const Setting& s, std::string_view world, Modality modality,
                              const Conjunction& candidate, const Formula& event, Definition def,
                              SearchOptions options = {}) {
  const Model& m = s.model();
  std::size_t w = m.world_index(world);
  for (std::size_t succ : m.successors(w)) {
    bool here = detail::require_conclusive(is_cause(s, m.worlds()[succ], candidate, event, def, options));
    if (modality == Modality::dia && here) return true;
    if (modality == Modality::box && !here) return false;
  }
  return modality == Modality::box;
}

}  // namespace causalmk
