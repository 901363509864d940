#include "contract_diag/linear_implication.hpp"
#include "contract_diag/linear_term.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace contract_diag;

namespace {

LinearTerm term(std::map<std::string, Rational> c, Rational b) { return LinearTerm(std::move(c), std::move(b)); }

}  // namespace

TEST(LinearParse, SumBound) { EXPECT_EQ(parse_linear("o + i <= 3"), term({{"o", 1}, {"i", 1}}, 3)); }

TEST(LinearParse, GreaterEqualFlipsSign) { EXPECT_EQ(parse_linear("i >= 0"), term({{"i", -1}}, 0)); }

TEST(LinearParse, RearrangedPrimeVariable) {
  LinearTerm t = parse_linear("2*o' >= 6 - o");
  EXPECT_EQ(t, term({{"o'", -2}, {"o", -1}}, -6));
  // Compare against the raw text semantics on random points.
  std::mt19937 rng(7);
  for (int i = 0; i < 100; ++i) {
    Rational o = oracle::random_rational(rng), op = oracle::random_rational(rng);
    bool raw = 2 * op >= 6 - o;
    EXPECT_EQ(evaluate(t, {{"o", o}, {"o'", op}}), raw);
  }
}

TEST(LinearParse, Literals) {
  EXPECT_EQ(parse_linear("x <= 1/2"), term({{"x", 2}}, 1));
  EXPECT_EQ(parse_linear("0.25*x <= 1"), term({{"x", 1}}, 4));
  EXPECT_EQ(parse_linear("3x - (x + y) <= -4"), term({{"x", 2}, {"y", -1}}, -4));
  EXPECT_EQ(parse_linear("x/3 <= 1"), term({{"x", 1}}, 3));
  EXPECT_EQ(parse_linear("c_T1@2 <= 1").variables(), VarSet{"c_T1@2"});
}

TEST(LinearParse, EqualityNeedsMulti) {
  EXPECT_THROW(parse_linear("x = 1"), ParseError);
  auto both = parse_linear_multi("x = 1");
  ASSERT_EQ(both.size(), 2u);
  EXPECT_EQ(both[0], term({{"x", 1}}, 1));
  EXPECT_EQ(both[1], term({{"x", -1}}, -1));
}

TEST(LinearParse, Errors) {
  EXPECT_THROW(parse_linear("x * y <= 1"), ParseError);
  EXPECT_THROW(parse_linear("x < 1"), ParseError);
  EXPECT_THROW(parse_linear("x <= "), ParseError);
  EXPECT_THROW(parse_linear("x <= 1 1"), ParseError);
  EXPECT_THROW(parse_linear("x / 0 <= 1"), ParseError);
  EXPECT_THROW(parse_linear("x / y <= 1"), ParseError);
  EXPECT_THROW(parse_linear("x ? 1"), ParseError);
  try {
    parse_linear("x <= $");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 5u);
  }
}

TEST(LinearParse, ConstantsBecomeMarkers) {
  EXPECT_TRUE(parse_linear("0 <= 3").is_true());
  EXPECT_TRUE(parse_linear("x - x <= 0").is_true());
  EXPECT_TRUE(parse_linear("1 <= 0").is_false());
  EXPECT_TRUE(parse_linear("true").is_true());
  EXPECT_TRUE(parse_linear("false").is_false());
}

TEST(LinearRender, Format) {
  EXPECT_EQ(render(parse_linear("i - 2*o' <= -3")), "i - 2*o' <= -3");
  EXPECT_EQ(render(parse_linear("o + i <= 3")), "i + o <= 3");
  EXPECT_EQ(render(parse_linear("x <= 1/2")), "2*x <= 1");
  EXPECT_EQ(render(LinearTerm::true_marker()), "true");
  EXPECT_EQ(render(LinearTerm::false_marker()), "false");
}

TEST(LinearProperty, RenderRoundTripAndIdempotence) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> coef(-5, 5);
  const std::vector<std::string> names{"a", "b", "o'", "x_1"};
  for (int i = 0; i < 1000; ++i) {
    std::map<std::string, Rational> c;
    for (const auto& n : names) c[n] = Rational(coef(rng), 1 + (i % 3));
    LinearTerm t(c, oracle::random_rational(rng));
    LinearTerm again(t.coefficients(), t.bound());
    EXPECT_EQ(again, t);
    EXPECT_EQ(parse_linear(render(t)), t);
  }
}

TEST(LinearEvaluate, Examples) {
  EXPECT_FALSE(evaluate(parse_linear("o <= a"), {{"o", 3}, {"a", 2}}));
  EXPECT_TRUE(evaluate(parse_linear("i <= 2"), {{"i", 1}}));
  EXPECT_TRUE(evaluate(parse_linear("x <= 0"), {{"x", 0}}));
  try {
    evaluate(parse_linear("x + y <= 0"), {{"x", 0}});
    FAIL();
  } catch (const MissingVariableError& e) {
    EXPECT_EQ(e.variable(), "y");
  }
}

TEST(LinearImplies, Examples) {
  EXPECT_TRUE(implies_linear({parse_linear("o + i <= 3"), parse_linear("-i <= 0")}, parse_linear("o <= 5")));
  EXPECT_FALSE(implies_linear({}, parse_linear("x <= 1")));
  EXPECT_TRUE(implies_linear({parse_linear("x <= 1")}, parse_linear("x <= 1")));
}

TEST(LinearImplies, ChainCrossCheckedBySampling) {
  std::mt19937 rng(3);
  std::vector<LinearTerm> ctx{parse_linear("o + i <= 3"), parse_linear("-i <= 0")};
  EXPECT_FALSE(oracle::sampled_counterexample(ctx, parse_linear("o <= 5"), rng));
  EXPECT_TRUE(oracle::sampled_counterexample(ctx, parse_linear("o <= 2"), rng));
  EXPECT_FALSE(implies_linear(ctx, parse_linear("o <= 2")));
}

TEST(LinearImplies, StrictBoundaries) {
  // x <= 1 and x >= 1 pin x; the tight bound is implied, anything tighter is not.
  std::vector<LinearTerm> ctx{parse_linear("x <= 1"), parse_linear("x >= 1")};
  EXPECT_TRUE(implies_linear(ctx, parse_linear("x >= 1")));
  EXPECT_TRUE(implies_linear(ctx, parse_linear("2*x <= 2")));
  EXPECT_FALSE(implies_linear(ctx, parse_linear("x <= 0")));
  // Infeasible context implies everything.
  EXPECT_TRUE(implies_linear({parse_linear("x <= 0"), parse_linear("x >= 1")}, parse_linear("y <= -100")));
  EXPECT_TRUE(implies_linear({LinearTerm::false_marker()}, parse_linear("y <= 0")));
  EXPECT_FALSE(implies_linear({}, LinearTerm::false_marker()));
  EXPECT_TRUE(implies_linear({}, LinearTerm::true_marker()));
}

TEST(LinearProperty, ImplicationConsistentWithEvaluation) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> coef(-3, 3), bound(-4, 4), size(1, 3);
  const std::vector<std::string> names{"x", "y", "z"};
  auto random_term = [&] {
    std::map<std::string, Rational> c;
    for (const auto& n : names) c[n] = coef(rng);
    return LinearTerm(c, bound(rng));
  };
  int implied = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<LinearTerm> ctx;
    for (int k = size(rng); k > 0; --k) ctx.push_back(random_term());
    LinearTerm t = random_term();
    // Often pick a positive combination so implied cases are exercised.
    if (i % 2 == 0 && !ctx.empty()) t = ctx[0].combine(1, ctx.back(), 1);
    bool imp = implies_linear(ctx, t);
    if (imp) {
      ++implied;
      EXPECT_FALSE(oracle::sampled_counterexample(ctx, t, rng, 300)) << render(t);
    }
  }
  EXPECT_GT(implied, 100);
}
