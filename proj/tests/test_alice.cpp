#include "contract_diag/contract_diag.hpp"

#include <gtest/gtest.h>

using namespace contract_diag;

namespace {

std::string fixture(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

struct Pipeline {
  SystemSpec spec;
  CompositionOrder<PropTheory> order;
  SystemBuild<PropTheory> build;
};

Pipeline pipeline(const std::string& name) {
  Pipeline p;
  p.spec = load_spec(fixture(name + ".json"));
  p.order = to_order<PropTheory>(p.spec);
  p.build = build_system(p.order);
  return p;
}

}  // namespace

TEST(AliceLog, FirstRowOfTrace) {
  auto spec = load_spec(fixture("alice_core.json"));
  auto log = load_log<PropTheory>(fixture("alice_core_full.csv"), spec);
  // step, poor_visibility, icy_roads, c_T1..3, c_P1..3, q1..4, v
  const std::vector<int> row{0, 0, 0, 1, 1, 1, 1, 1, 1, 0, 0, 0, 1, 0};
  const std::vector<std::string> names{"poor_visibility", "icy_roads", "c_T1", "c_T2", "c_T3", "c_P1", "c_P2",
                                       "c_P3",            "q1",        "q2",   "q3",   "q4",   "v"};
  for (std::size_t i = 0; i < names.size(); ++i) EXPECT_EQ(log.at(names[i] + "@0"), row[i + 1] == 1) << names[i];
}

TEST(AliceLog, PerceptionEquivalenceAtStepOne) {
  auto t = parse_prop("c_T1@1 <=> c_P1@1");
  EXPECT_FALSE(evaluate(t, {{"c_T1@1", true}, {"c_P1@1", false}}));
  EXPECT_TRUE(evaluate(parse_prop("!poor_visibility"), {{"poor_visibility", false}}));
}

TEST(AliceCore, FullLogBlamesPerceptionAtStepOne) {
  auto p = pipeline("alice_core");
  auto log = load_log<PropTheory>(fixture("alice_core_full.csv"), p.spec);
  Diagnoser<PropTheory> d(p.order, p.build, log);
  d.diagnose_all();
  const auto& r = d.report();
  ASSERT_FALSE(r.violated_guarantees.empty());
  EXPECT_EQ(r.faulty_components, std::set<std::string>{"Perception@1"});
  EXPECT_EQ(oracle_diagnose(p.order, log), r.faulty_components);
  std::vector<std::string> failed;
  for (const auto& e : r.evaluations)
    if (!e.satisfied) failed.push_back(e.text);
  EXPECT_EQ(failed, std::vector<std::string>{"c_T1@1 <=> c_P1@1"});
  EXPECT_LT(r.terms_checked, r.terms_total);
}

TEST(AliceCore, MaskedLogNeedsInternalValues) {
  auto p = pipeline("alice_core");
  EXPECT_THROW(load_log<PropTheory>(fixture("alice_core_masked.csv"), p.spec), IoError);
  auto log = load_log<PropTheory>(fixture("alice_core_masked.csv"), p.spec, {.require_total = false});
  EXPECT_FALSE(log.count("c_P1@1"));
  EXPECT_TRUE(log.count("v@2"));
  Diagnoser<PropTheory> d(p.order, p.build, log);
  EXPECT_THROW(d.diagnose_all(), MissingVariableError);
}

TEST(AliceScaled, FillerDoesNotChangeVerdict) {
  auto p = pipeline("alice_scaled");
  auto log = load_log<PropTheory>(fixture("alice_scaled_full.csv"), p.spec);
  Diagnoser<PropTheory> d(p.order, p.build, log);
  d.diagnose_all();
  const auto& r = d.report();
  EXPECT_EQ(r.faulty_components, std::set<std::string>{"Perception@1"});
  EXPECT_LT(static_cast<double>(r.terms_checked) / static_cast<double>(r.terms_total), 0.25);
}
