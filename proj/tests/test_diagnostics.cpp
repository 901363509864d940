#include "contract_diag/diagnostics.hpp"
#include "support/examples.hpp"

#include <gtest/gtest.h>

using namespace contract_diag;

namespace {

TermId A(const std::string& o, std::size_t i) { return {o, Section::assumption, i}; }
TermId G(const std::string& o, std::size_t i) { return {o, Section::guarantee, i}; }

}  // namespace

TEST(BuildSystem, TwoSourcesOneSink) {
  auto order = examples::two_sources_one_sink();
  auto b = build_system(order);
  EXPECT_EQ(b.system.inputs(), (VarSet{"i", "j"}));
  EXPECT_EQ(b.system.outputs(), VarSet{"o"});
  ASSERT_EQ(b.system.guarantees().size(), 1u);
  EXPECT_EQ(b.system.guarantees()[0].term, parse_linear("o <= 2"));
  EXPECT_EQ(b.system.assumptions().size(), 4u);
  EXPECT_EQ(b.prefixes.size(), 3u);
  EXPECT_EQ(b.prefixes[1].name(), "comp_2");
  EXPECT_EQ(b.prefixes[1].outputs(), (VarSet{"a", "b"}));
}

TEST(BuildSystem, SingleContract) {
  CompositionOrder<LinearTheory> order;
  order.contracts.push_back(examples::series_pair().contracts[0]);
  auto b = build_system(order);
  EXPECT_EQ(b.system.name(), "M1");
  EXPECT_TRUE(b.graph.edges().empty());
  auto cm = diagnostics_map(b.graph, b, G("M1", 0));
  ASSERT_EQ(cm.size(), 1u);
  EXPECT_EQ(cm[0].term, G("M1", 0));
}

TEST(BuildSystem, ErrorsNameTheStage) {
  CompositionOrder<LinearTheory> order;
  order.contracts.push_back(make_contract<LinearTheory>("P", {"i"}, {"x"}, {}, {"-x <= 0"}));
  order.contracts.push_back(make_contract<LinearTheory>("Q", {"x"}, {"y"}, {"x <= 1"}, {}));
  try {
    build_system(order);
    FAIL();
  } catch (const CompositionError& e) {
    EXPECT_NE(std::string(e.what()).find("stage 2"), std::string::npos);
  }
  CompositionOrder<LinearTheory> empty;
  EXPECT_THROW(build_system(empty), CompositionError);
}

TEST(DiagnosticsMap, TwoSourcesOneSink) {
  auto order = examples::two_sources_one_sink();
  auto b = build_system(order);
  auto cm = diagnostics_map(b.graph, b, b.system.guarantees()[0].id);
  std::vector<MapEntry> expected{{G("M1", 0), "M1"}, {G("M3", 0), "M3"}};
  EXPECT_EQ(cm, expected);
  EXPECT_THROW(diagnostics_map(b.graph, b, G("nowhere", 0)), DiagnosisError);
}

TEST(DiagnosticsMap, PassThroughAssumptionMapsToItself) {
  auto order = examples::two_sources_one_sink();
  auto b = build_system(order);
  auto cm = diagnostics_map(b.graph, b, b.system.assumptions()[0].id);
  ASSERT_EQ(cm.size(), 1u);
  EXPECT_EQ(cm[0].term, A("M1", 0));
}

TEST(DiagnosticsMap, SeriesPairGuarantee) {
  auto order = examples::series_pair();
  auto b = build_system(order);
  auto cm = diagnostics_map(b.graph, b, b.system.guarantees()[0].id);
  std::vector<MapEntry> expected{{G("M1", 0), "M1"}, {G("M2", 0), "M2"}};
  EXPECT_EQ(cm, expected);
}

TEST(Diagnose, TwoSourcesOneSink) {
  auto order = examples::two_sources_one_sink();
  auto b = build_system(order);
  auto r = diagnose(b.system.guarantees()[0].id, order, b, examples::two_sources_log());
  EXPECT_EQ(r.faulty_components, std::set<std::string>{"M2"});
  std::vector<std::pair<TermId, bool>> seen;
  for (const auto& e : r.evaluations) seen.push_back({e.id, e.satisfied});
  std::vector<std::pair<TermId, bool>> expected{{G("M1", 0), true},  {G("M3", 0), false}, {A("M3", 0), true},
                                                {A("M3", 1), false}, {G("M2", 0), false}, {A("M2", 0), true},
                                                {A("M2", 1), true}};
  EXPECT_EQ(seen, expected);
  EXPECT_EQ(r.terms_checked, 7u);
  EXPECT_EQ(r.terms_total, 10u);
  EXPECT_FALSE(r.low_confidence);
  ASSERT_EQ(r.trace.size(), 1u);
  const auto& leaf = r.trace[0].leaves[1];
  ASSERT_EQ(leaf.assumptions.size(), 1u);
  EXPECT_EQ(leaf.assumptions[0].causes, std::vector<TermId>{G("comp_2", 1)});
}

TEST(Diagnose, FindCauseReturnsSourceGuarantee) {
  auto order = examples::two_sources_one_sink();
  auto b = build_system(order);
  auto log = examples::two_sources_log();
  Diagnoser<LinearTheory> d(order, b, log);
  bool low = false, suffix = false;
  auto causes = d.find_cause_for_assumption(order.contracts[2].assumptions()[1], 2, low, suffix);
  ASSERT_EQ(causes.size(), 1u);
  EXPECT_EQ(b.prefixes[1].find(causes[0])->term, parse_linear("b <= 3"));
  EXPECT_FALSE(low);
  EXPECT_FALSE(suffix);
}

TEST(Diagnose, Preconditions) {
  auto order = examples::two_sources_one_sink();
  auto b = build_system(order);
  auto log = examples::two_sources_log();
  log["o"] = 1;
  try {
    diagnose(b.system.guarantees()[0].id, order, b, log);
    FAIL();
  } catch (const DiagnosisError& e) {
    EXPECT_NE(std::string(e.what()).find("no violation"), std::string::npos);
  }
  log = examples::two_sources_log();
  log["i"] = 5;
  try {
    diagnose(b.system.guarantees()[0].id, order, b, log);
    FAIL();
  } catch (const DiagnosisError& e) {
    EXPECT_NE(std::string(e.what()).find("not a system-level failure"), std::string::npos);
  }
  log = examples::two_sources_log();
  log.erase("b");
  EXPECT_THROW(diagnose(b.system.guarantees()[0].id, order, b, log), MissingVariableError);
  EXPECT_THROW(diagnose(A("comp_3", 0), order, b, examples::two_sources_log()), DiagnosisError);
}

TEST(Diagnose, SoundAndMatchesOracle) {
  auto order = examples::two_sources_one_sink();
  auto b = build_system(order);
  auto log = examples::two_sources_log();
  auto r = diagnose(b.system.guarantees()[0].id, order, b, log);
  EXPECT_EQ(r.faulty_components, oracle_diagnose(order, log));
  auto st = component_statuses(order, log);
  for (const auto& c : r.faulty_components) EXPECT_EQ(st.at(c).status, Status::fail);
}

TEST(Diagnose, Deterministic) {
  auto order = examples::two_sources_one_sink();
  auto b1 = build_system(order);
  auto b2 = build_system(order);
  auto r1 = diagnose(b1.system.guarantees()[0].id, order, b1, examples::two_sources_log());
  auto r2 = diagnose(b2.system.guarantees()[0].id, order, b2, examples::two_sources_log());
  ASSERT_EQ(r1.evaluations.size(), r2.evaluations.size());
  for (std::size_t i = 0; i < r1.evaluations.size(); ++i) {
    EXPECT_EQ(r1.evaluations[i].id, r2.evaluations[i].id);
    EXPECT_EQ(r1.evaluations[i].satisfied, r2.evaluations[i].satisfied);
  }
}

TEST(Diagnose, FaultInFirstComponent) {
  auto order = examples::two_sources_one_sink();
  auto b = build_system(order);
  Valuation<Rational> log{{"i", 1}, {"j", 1}, {"a", 3}, {"b", 3}, {"o", 3}};
  Diagnoser<LinearTheory> d(order, b, log);
  EXPECT_EQ(d.diagnose_all(), 1u);
  EXPECT_EQ(d.report().faulty_components, std::set<std::string>{"M1"});
  EXPECT_EQ(oracle_diagnose(order, log), std::set<std::string>{"M1"});
}

TEST(Diagnose, FirstInOrderUsesLaterContracts) {
  // Feedback: the first contract reads an output of the second.
  CompositionOrder<LinearTheory> order;
  order.contracts.push_back(make_contract<LinearTheory>("A", {"u"}, {"y"}, {"u <= 1"}, {"y <= u"}));
  order.contracts.push_back(make_contract<LinearTheory>("B", {"x"}, {"u"}, {"x <= 1"}, {"u <= x"}));
  auto b = build_system(order);
  Valuation<Rational> log{{"x", 1}, {"u", 5}, {"y", 6}};
  Diagnoser<LinearTheory> d(order, b, log);
  d.diagnose_all();
  const auto& r = d.report();
  EXPECT_EQ(r.faulty_components, std::set<std::string>{"B"});
  EXPECT_FALSE(r.warnings.empty());
}
