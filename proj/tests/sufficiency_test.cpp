#include <gtest/gtest.h>

#include "causalmk/parser.hpp"
#include "causalmk/sufficiency.hpp"
#include "support/oracle_bridge.hpp"
#include "support/properties.hpp"

using namespace causalmk;

namespace {

Setting forest() { return oracle::to_setting(properties::conjunctive_forest()); }

// Contexts in order: (E0,E1) = 00, 01, 10, 11.
constexpr std::size_t kBoth = 3;

}  // namespace

TEST(ContextSpace, EnumeratesAllContexts) {
  Setting s = forest();
  auto cs = all_contexts(s.model());
  ASSERT_EQ(cs.size(), 4u);
  EXPECT_EQ(cs[kBoth].values()[0], 1);
  EXPECT_EQ(cs[kBoth].values()[1], 1);
  EXPECT_EQ(cs[1].values()[0], 0);
  EXPECT_EQ(cs[1].values()[1], 1);
}

TEST(ContextSpace, HammingRelationIsReflexive) {
  Setting s = forest();
  auto cs = all_contexts(s.model());
  auto near = hamming_nearby(cs, 1);
  EXPECT_EQ(near.size(), 12u);
  ContextSpace space = properties::space_of(s, {}, true);
  EXPECT_EQ(space.nearby().size(), 4u);
  EXPECT_TRUE(space.is_nearby(2, 2));
  EXPECT_FALSE(properties::space_of(s, {}, false).is_nearby(2, 2));
}

TEST(ContextSpace, RejectsMultiWorldBases) {
  Signature sig;
  sig.add_exogenous("U", {0, 1});
  auto m = std::make_shared<const Model>(build_model(sig, {"a", "b"}, {}, {}));
  EXPECT_THROW(ContextSpace(m, all_contexts(*m), {}), DeclarationError);
}

TEST(Lift, OneWorldPerContext) {
  Setting s = forest();
  ContextSpace space = properties::space_of(s, hamming_nearby(all_contexts(s.model()), 1), true);
  LiftedModel lifted = lift_to_kripke(space);
  const Model& m = *lifted.model;
  ASSERT_EQ(m.world_count(), 4u);
  EXPECT_EQ(m.worlds()[3], lifted_world(3));
  EXPECT_TRUE(m.related(0, 1));
  EXPECT_FALSE(m.related(0, 3));
  Setting ls = lifted.setting();
  EXPECT_TRUE(satisfies(ls, "u3", parse("X2=1")));
  EXPECT_FALSE(satisfies(ls, "u2", parse("X2=1")));
  EXPECT_TRUE(satisfies(ls, "u0", parse("box([X0@u0 := 1, X1@u0 := 1] X2@u0=1)")));
}

TEST(Sufficiency, ConjunctionIsSufficientNotEitherConjunct) {
  Setting s = forest();
  ContextSpace space = properties::space_of(s, {}, true);
  Formula fire = parse_event("X2=1");
  SufficiencyVerdict both = is_sufficient_cause(space, kBoth, parse_conjunction("X0@w=1 & X1@w=1"), fire, Scope::global);
  EXPECT_TRUE(both.holds);
  EXPECT_TRUE(both.minimal);
  SufficiencyVerdict one = is_sufficient_cause(space, kBoth, parse_conjunction("X0@w=1"), fire, Scope::global);
  EXPECT_TRUE(one.sc1);
  EXPECT_TRUE(one.sc2);
  EXPECT_FALSE(one.sc3);
  ASSERT_TRUE(one.sc3_counterexample.has_value());
  EXPECT_FALSE(one.holds);
}

TEST(Sufficiency, FireItselfIsTriviallySufficientButNotMinimalWithExtras) {
  Setting s = forest();
  ContextSpace space = properties::space_of(s, {}, true);
  Formula fire = parse_event("X2=1");
  EXPECT_TRUE(is_sufficient_cause(space, kBoth, parse_conjunction("X2@w=1"), fire, Scope::global).holds);
  SufficiencyVerdict v =
      is_sufficient_cause(space, kBoth, parse_conjunction("X0@w=1 & X2@w=1"), fire, Scope::global);
  EXPECT_FALSE(v.minimal);
  ASSERT_TRUE(v.smaller.has_value());
}

TEST(Sufficiency, LocalScopeOnlyLooksAtNearbyContexts) {
  Setting s = forest();
  // Only context 3 is near itself: a single conjunct suffices locally.
  ContextSpace space = properties::space_of(s, {}, true);
  Formula fire = parse_event("X2=1");
  SufficiencyVerdict v = is_sufficient_cause(space, kBoth, parse_conjunction("X0@w=1"), fire, Scope::local);
  EXPECT_TRUE(v.sc3);
  EXPECT_TRUE(v.holds);
  ContextSpace wide = properties::space_of(s, hamming_nearby(all_contexts(s.model()), 1), true);
  EXPECT_FALSE(is_sufficient_cause(wide, kBoth, parse_conjunction("X0@w=1"), fire, Scope::local).sc3);
}

TEST(Sufficiency, FailingSc1) {
  Setting s = forest();
  ContextSpace space = properties::space_of(s, {}, true);
  SufficiencyVerdict v = is_sufficient_cause(space, 0, parse_conjunction("X0@w=1"), parse_event("X2=1"), Scope::global);
  EXPECT_FALSE(v.sc1);
  EXPECT_FALSE(v.holds);
}

TEST(Sufficiency, MatchesBruteForceOnForests) {
  auto r = properties::sufficiency_agreement(properties::conjunctive_forest(), properties::atom_event(2, 1));
  EXPECT_EQ(r.mismatches, 0u) << r.first;
  EXPECT_GT(r.sufficient, 0u);
  oracle::Sem disjunctive = properties::conjunctive_forest();
  disjunctive.tables[2] = {0, 1, 1, 1};
  r = properties::sufficiency_agreement(disjunctive, properties::atom_event(2, 1));
  EXPECT_EQ(r.mismatches, 0u) << r.first;
}

TEST(Sufficiency, MatchesBruteForceOnRandomModels) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 15; ++i) {
    oracle::Sem sem = oracle::random_sem(rng, 3, 2);
    auto r = properties::sufficiency_agreement(sem, oracle::random_expr(rng, 3, 2));
    EXPECT_EQ(r.mismatches, 0u) << r.first;
  }
}

TEST(Sufficiency, GlobalImpliesLocal) {
  auto r = properties::local_monotonicity(properties::conjunctive_forest(), properties::atom_event(2, 1), 30, 4);
  EXPECT_EQ(r.violations, 0u) << r.first;
}

TEST(Sufficiency, Errors) {
  Setting s = forest();
  ContextSpace space = properties::space_of(s, {}, true);
  Formula fire = parse_event("X2=1");
  EXPECT_THROW(is_sufficient_cause(space, 9, parse_conjunction("X0@w=1"), fire, Scope::global), DanglingRefError);
  EXPECT_THROW(is_sufficient_cause(space, 0, {}, fire, Scope::global), DeclarationError);
  EXPECT_THROW(properties::space_of(s, {{0, 7}}, true), DanglingRefError);
}
