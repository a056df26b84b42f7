#include <gtest/gtest.h>

#include "causalmk/parser.hpp"
#include "causalmk/semantics.hpp"
#include "support/fixtures.hpp"

using namespace causalmk;

TEST(Satisfies, UmbrellaAtW0) {
  Setting s = fixtures::umbrella();
  EXPECT_TRUE(satisfies(s, "w0", parse("q=1")));
  EXPECT_TRUE(satisfies(s, "w0", parse("[p@w3 := 0] !(q=1)")));
  EXPECT_TRUE(satisfies(s, "w0", parse("[r@w3 := 0] !(q=1)")));
  EXPECT_FALSE(satisfies(s, "w0", parse("[p@w1 := 0] !(q=1)")));
  EXPECT_TRUE(satisfies(s, "w0", parse("[p@w1 := 1] q=1")));
  EXPECT_TRUE(satisfies(s, "w0", parse("dia(p=1 & r=1)")));
  EXPECT_FALSE(satisfies(s, "w0", parse("box(p=1)")));
}

TEST(Satisfies, VacuousBox) {
  Setting s = fixtures::umbrella();
  for (const char* w : {"w1", "w2", "w3"}) {
    EXPECT_TRUE(satisfies(s, w, parse("box(false)")));
    EXPECT_FALSE(satisfies(s, w, parse("dia(true)")));
  }
}

TEST(Satisfies, ConverseModalities) {
  Setting s = fixtures::umbrella();
  EXPECT_TRUE(satisfies(s, "w1", parse("cdia(q=1)")));
  EXPECT_TRUE(satisfies(s, "w3", parse("cbox(q=1)")));
  EXPECT_TRUE(satisfies(s, "w0", parse("cbox(false)")));
}

TEST(Satisfies, GlobalAtomsAreWorldIndependent) {
  Setting s = fixtures::umbrella();
  const char* atoms[] = {"q@w0=1", "p@w1=1", "r@w3=1", "q@w2=0", "[p@w3 := 0] q@w0=1"};
  for (const char* a : atoms) {
    Formula f = parse(a);
    bool first = satisfies(s, "w0", f);
    for (const char* w : {"w1", "w2", "w3"}) EXPECT_EQ(satisfies(s, w, f), first) << a;
  }
}

TEST(Satisfies, DanglingReferences) {
  Setting s = fixtures::umbrella();
  EXPECT_THROW(satisfies(s, "w9", parse("q=1")), DanglingRefError);
  EXPECT_THROW(satisfies(s, "w0", parse("zz=1")), DanglingRefError);
  EXPECT_THROW(satisfies(s, "w0", parse("q@w9=1")), DanglingRefError);
  EXPECT_THROW(satisfies(s, "w0", parse("[U1@w0 := 1] q=1")), DeclarationError);
  EXPECT_THROW(satisfies(s, "w0", parse("[p@w0 := 3] q=1")), RangeError);
}

TEST(ValidInModel, Basics) {
  Setting um = fixtures::umbrella();
  EXPECT_TRUE(valid_in_model(um, parse("q@w0=1")));
  EXPECT_TRUE(valid_in_model(um, parse("true")));
  Setting st = fixtures::stalemate();
  EXPECT_FALSE(valid_in_model(st, parse("p=1")));
  EXPECT_TRUE(satisfies(st, "w0", parse("box(p=1)")));
}

TEST(Satisfies, InterventionCommutesWithModality) {
  Setting s = fixtures::umbrella();
  const char* pairs[][2] = {
      {"[p@w1 := 1] dia(q=1)", "dia([p@w1 := 1] q=1)"},
      {"[r@w2 := 0] box(p=1 | r=1)", "box([r@w2 := 0] (p=1 | r=1))"},
      {"[p@w3 := 0, r@w1 := 1] dia(p=1 & r=1)", "dia([p@w3 := 0, r@w1 := 1] (p=1 & r=1))"},
  };
  for (const auto& pr : pairs)
    for (const char* w : {"w0", "w1", "w2", "w3"})
      EXPECT_EQ(satisfies(s, w, parse(pr[0])), satisfies(s, w, parse(pr[1]))) << pr[0] << " at " << w;
}
