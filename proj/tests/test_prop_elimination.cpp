#include "contract_diag/prop_elimination.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace contract_diag;

namespace {

TermId gid(const std::string& owner, std::size_t i) { return {owner, Section::guarantee, i}; }

std::vector<Entry<PropTerm>> ctx(std::initializer_list<std::pair<TermId, const char*>> items) {
  std::vector<Entry<PropTerm>> out;
  for (const auto& [id, text] : items) out.push_back({id, parse_prop(text)});
  return out;
}

}  // namespace

TEST(PropElimination, SubstitutesThroughEquivalence) {
  auto c = ctx({{gid("P", 0), "c_T1 <=> c_P1"}});
  PropTerm t = parse_prop("c_P1 <=> q_in");
  auto r = eliminate_prop(t, {"c_P1"}, c, Direction::relaxation);
  EXPECT_EQ(render(r.term), "c_T1 <=> q_in");
  EXPECT_EQ(r.used, std::vector<TermId>{gid("P", 0)});
  // Both directions hold given the context.
  EXPECT_TRUE(oracle::tt_implies({c[0].term, t}, r.term));
  EXPECT_TRUE(oracle::tt_implies({c[0].term, r.term}, t));
  auto rr = eliminate_prop(t, {"c_P1"}, c, Direction::refinement);
  EXPECT_EQ(render(rr.term), "c_T1 <=> q_in");
}

TEST(PropElimination, NothingToDo) {
  auto r = eliminate_prop(parse_prop("x"), {}, {}, Direction::refinement);
  EXPECT_EQ(render(r.term), "x");
  EXPECT_TRUE(r.used.empty());
}

TEST(PropElimination, RelaxationWithoutContextQuantifies) {
  auto r = eliminate_prop(parse_prop("x | y"), {"y"}, {}, Direction::relaxation);
  EXPECT_TRUE(r.term.is_true());
  EXPECT_TRUE(r.used.empty());
}

TEST(PropElimination, RefinementToFalseFails) {
  EXPECT_THROW(eliminate_prop(parse_prop("y"), {"y"}, {}, Direction::refinement), EliminationError);
  auto r = eliminate_prop(parse_prop("x | y"), {"y"}, {}, Direction::refinement);
  EXPECT_EQ(render(r.term), "x");
}

TEST(PropElimination, RefinementDischargedByContextTerm) {
  auto c = ctx({{gid("A", 0), "x"}, {gid("B", 0), "q => y"}, {gid("B", 1), "q"}});
  auto r = eliminate_prop(parse_prop("y"), {"y"}, c, Direction::refinement);
  EXPECT_EQ(render(r.term), "q");
  EXPECT_EQ(r.used, std::vector<TermId>{gid("B", 0)});
  auto r2 = eliminate_prop(parse_prop("y | x"), {"y", "q"}, c, Direction::refinement);
  EXPECT_TRUE(oracle::tt_implies({r2.term, c[0].term, c[1].term, c[2].term}, parse_prop("y | x")));
}

TEST(PropElimination, ResolvesImplicationChain) {
  auto c = ctx({{gid("A", 0), "a => b"}, {gid("B", 0), "b => c"}});
  auto r = eliminate_prop(parse_prop("c => o"), {"b", "c"}, c, Direction::relaxation);
  EXPECT_TRUE(oracle::tt_equivalent(r.term, parse_prop("a => o")));
  EXPECT_EQ(r.used.size(), 2u);
}

TEST(PropElimination, DefinitionReusedAfterResolution) {
  // Resolving on q brings c back; its definition must still be usable.
  auto c = ctx({{gid("P", 0), "t <=> c"}, {gid("Q", 0), "c & q => o"}});
  auto r = eliminate_prop(parse_prop("c & p => q"), {"c", "q"}, c, Direction::relaxation);
  EXPECT_TRUE(oracle::tt_equivalent(r.term, parse_prop("t & p => o")));
  EXPECT_EQ(r.used.size(), 2u);
}

TEST(PropElimination, CyclicDefinitionsTerminate) {
  auto c = ctx({{gid("A", 0), "a <=> b"}, {gid("B", 0), "b <=> a"}});
  auto r = eliminate_prop(parse_prop("a | x"), {"a", "b"}, c, Direction::relaxation);
  EXPECT_TRUE(r.term.is_true());
}

TEST(PropQuantify, KeepsIndependentConjunctsOutside) {
  auto t = parse_prop("(x => a) & (a => y) & (p <=> q)");
  auto e = exists("a", t);
  EXPECT_TRUE(oracle::tt_equivalent(e, parse_prop("(x => y) & (p <=> q)")));
  EXPECT_TRUE(oracle::tt_equivalent(forall("a", parse_prop("a | b | !a & c")), parse_prop("b | c")));
}

TEST(PropProperty, EmptyContextIsQuantification) {
  std::mt19937 rng(12);
  const std::vector<std::string> vars{"a", "b", "c", "d"};
  for (int i = 0; i < 300; ++i) {
    PropTerm t = oracle::random_prop(rng, vars, 3);
    auto rel = eliminate_prop(t, {"a"}, {}, Direction::relaxation);
    EXPECT_TRUE(oracle::tt_equivalent(rel.term, exists("a", t)));
    PropTerm all = forall("a", t);
    if (all.is_false() && t.variables().count("a")) {
      EXPECT_THROW(eliminate_prop(t, {"a"}, {}, Direction::refinement), EliminationError);
    } else {
      EXPECT_TRUE(oracle::tt_equivalent(eliminate_prop(t, {"a"}, {}, Direction::refinement).term, all));
    }
  }
}

TEST(PropProperty, RandomEliminationSoundAndMinimal) {
  std::mt19937 rng(21);
  const std::vector<std::string> vars{"a", "b", "c", "d", "e"};
  std::uniform_int_distribution<int> nctx(1, 4), coin(0, 1);
  int ok = 0;
  for (int i = 0; i < 600; ++i) {
    std::vector<Entry<PropTerm>> c;
    for (int k = nctx(rng); k > 0; --k) c.push_back({gid("K", c.size()), oracle::random_prop(rng, vars, 2)});
    PropTerm t = oracle::random_prop(rng, vars, 2);
    VarSet elim{"a", "b"};
    Direction dir = coin(rng) ? Direction::refinement : Direction::relaxation;
    EliminationResult<PropTerm> r;
    try {
      r = eliminate_prop(t, elim, c, dir);
    } catch (const EliminationError&) {
      continue;
    }
    ++ok;
    for (const auto& v : r.term.variables()) EXPECT_FALSE(elim.count(v));
    std::vector<PropTerm> used;
    for (const auto& id : r.used) used.push_back(c[id.index].term);
    auto prem = used;
    prem.push_back(dir == Direction::refinement ? r.term : t);
    const PropTerm& goal = dir == Direction::refinement ? t : r.term;
    EXPECT_TRUE(oracle::tt_implies(prem, goal)) << render(t) << " -> " << render(r.term);
    for (std::size_t k = 0; k < used.size(); ++k) {
      std::vector<PropTerm> less;
      for (std::size_t j = 0; j < used.size(); ++j)
        if (j != k) less.push_back(used[j]);
      less.push_back(dir == Direction::refinement ? r.term : t);
      EXPECT_FALSE(oracle::tt_implies(less, goal));
    }
  }
  EXPECT_GT(ok, 300);
}
