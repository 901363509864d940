// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed lines.
#include "contract_diag/contract_diag.hpp"
#include "support/examples.hpp"
#include "support/oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace contract_diag;

namespace {

// Wall-clock limits, seconds.
constexpr double kExampleLimit = 1.0;
constexpr double kAliceCoreLimit = 10.0;
constexpr double kAliceScaledLimit = 60.0;
constexpr double kHarnessLimit = 300.0;
constexpr double kEliminationLimit = 120.0;

constexpr double kScaledRatioBound = 0.25;
constexpr int kHarnessCases = 200;
constexpr int kEliminationCalls = 500;

std::string fixture(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

int failures = 0;

void line(int n, const std::string& title, bool ok, double seconds, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("[%s] %d. %s (%.3fs) %s\n", ok ? "PASS" : "FAIL", n, title.c_str(), seconds, detail.c_str());
}

void run(int n, const std::string& title, double limit, const std::function<bool(std::ostringstream&)>& body) {
  std::ostringstream detail;
  bool ok = false;
  auto t0 = std::chrono::steady_clock::now();
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail << "exception: " << e.what();
  }
  double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (s >= limit) {
    ok = false;
    detail << " over the " << limit << "s limit";
  }
  line(n, title, ok, s, detail.str());
}

bool same_set(const std::vector<LinearTerm>& a, const std::vector<LinearTerm>& b) {
  for (const auto& t : b)
    if (!implies_linear(a, t)) return false;
  for (const auto& t : a)
    if (!implies_linear(b, t)) return false;
  return true;
}

std::vector<LinearTerm> parse_all(std::initializer_list<const char*> texts) {
  std::vector<LinearTerm> out;
  for (auto t : texts) out.push_back(parse_linear(t));
  return out;
}

bool alice(const std::string& name, std::ostringstream& detail, double ratio_bound) {
  auto spec = load_spec(fixture(name + ".json"));
  auto order = to_order<PropTheory>(spec);
  auto build = build_system(order);
  auto log = load_log<PropTheory>(fixture(name + "_full.csv"), spec);
  Diagnoser<PropTheory> d(order, build, log);
  d.diagnose_all();
  const auto& r = d.report();
  std::vector<std::string> failed;
  for (const auto& e : r.evaluations)
    if (!e.satisfied && e.id.owner == "Perception@1") failed.push_back(e.text);
  double ratio = static_cast<double>(r.terms_checked) / static_cast<double>(r.terms_total);
  detail << "faulty {";
  for (const auto& f : r.faulty_components) detail << f << (f == *r.faulty_components.rbegin() ? "" : ",");
  detail << "}, " << r.terms_checked << "/" << r.terms_total << " checked (" << 100 * ratio << "%)";
  bool step_one_iff = failed.size() == 1 && failed[0].starts_with("c_T") && failed[0].find("@1 <=> c_P") != std::string::npos;
  return r.faulty_components == std::set<std::string>{"Perception@1"} && step_one_iff && ratio < ratio_bound;
}

template <typename Theory>
bool harness_case(std::uint64_t seed, const std::string& theory, int& cases, int& mismatches) {
  int n = 3 + static_cast<int>(seed % 6);
  auto spec = gen_system(seed, n, theory);
  auto order = to_order<Theory>(spec);
  auto build = build_system(order);
  std::mt19937_64 rng(seed ^ 0x5eed);
  std::set<std::string> targets{order.contracts[rng() % order.contracts.size()].name()};
  if (rng() % 3 == 0) targets.insert(order.contracts[rng() % order.contracts.size()].name());
  auto log = inject_fault(order, build, seed, targets);
  if (!log) return false;
  ++cases;
  Diagnoser<Theory> d(order, build, *log);
  d.diagnose_all();
  if (d.report().faulty_components != oracle_diagnose(order, *log)) ++mismatches;
  return true;
}

}  // namespace

int main() {
  run(1, "Series pair composition", kExampleLimit, [](std::ostringstream& detail) {
    auto order = to_order<LinearTheory>(load_spec(fixture("series_pair.json")));
    auto r = compose(order.contracts[0], order.contracts[1], {}, "comp_2");
    bool a = same_set(r.contract.assumption_terms(), parse_all({"i >= 0", "i <= 2"}));
    bool g = same_set(r.contract.guarantee_terms(), parse_all({"i - 2*o' <= -3"}));
    detail << "assumptions " << (a ? "ok" : "differ") << ", guarantees " << (g ? "ok" : "differ") << ", "
           << r.graph.edges().size() << " edges";
    return a && g && r.graph.edges().size() == 4;
  });

  run(2, "Two-source system diagnostics map and diagnosis", kExampleLimit, [](std::ostringstream& detail) {
    auto order = to_order<LinearTheory>(load_spec(fixture("two_sources.json")));
    auto build = build_system(order);
    const TermId gv = build.system.guarantees().at(0).id;
    auto cm = diagnostics_map(build.graph, build, gv);
    std::vector<MapEntry> expected{{{"M1", Section::guarantee, 0}, "M1"}, {{"M3", Section::guarantee, 0}, "M3"}};
    auto r = diagnose(gv, order, build, examples::two_sources_log());
    detail << "CM size " << cm.size() << ", faulty " << (r.faulty_components.size() == 1 ? *r.faulty_components.begin() : "?")
           << ", checked " << r.terms_checked << "/" << r.terms_total << " (target 6: measured " << r.terms_checked
           << ")";
    return cm == expected && r.faulty_components == std::set<std::string>{"M2"} && r.terms_checked <= 10 &&
           r.terms_total == 10;
  });

  run(3, "Alice core diagnosis", kAliceCoreLimit,
      [](std::ostringstream& detail) { return alice("alice_core", detail, 1.0); });

  run(4, "Alice scaled diagnosis", kAliceScaledLimit,
      [](std::ostringstream& detail) { return alice("alice_scaled", detail, kScaledRatioBound); });

  run(5, "Harness completeness", kHarnessLimit, [](std::ostringstream& detail) {
    int cases = 0, mismatches = 0, linear = 0, prop = 0;
    for (std::uint64_t seed = 1000; cases < kHarnessCases && seed < 1000 + 4 * kHarnessCases; ++seed) {
      if (seed % 2 == 0)
        linear += harness_case<LinearTheory>(seed, "linear", cases, mismatches);
      else
        prop += harness_case<PropTheory>(seed, "prop", cases, mismatches);
    }
    detail << cases << " systems (" << linear << " linear, " << prop << " prop), " << mismatches << " mismatches";
    return cases >= kHarnessCases && mismatches == 0 && linear > 0 && prop > 0;
  });

  run(6, "Elimination soundness and minimal provenance", kEliminationLimit, [](std::ostringstream& detail) {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> coef(-3, 3), bound(-4, 4), nctx(1, 5), coin(0, 1);
    int calls = 0, bad = 0, linear = 0, prop = 0;
    auto id = [](std::size_t k) { return TermId{"K", Section::guarantee, k}; };
    for (int i = 0; calls < kEliminationCalls && i < 20 * kEliminationCalls; ++i) {
      Direction dir = coin(rng) ? Direction::refinement : Direction::relaxation;
      if (i % 2 == 0) {
        const std::vector<std::string> names{"x", "y", "z", "w"};
        auto term = [&] {
          std::map<std::string, Rational> c;
          for (const auto& n : names)
            if (coin(rng)) c[n] = coef(rng);
          return LinearTerm(c, bound(rng));
        };
        std::vector<Entry<LinearTerm>> ctx;
        for (int k = nctx(rng); k > 0; --k) ctx.push_back({id(ctx.size()), term()});
        LinearTerm t = term();
        EliminationResult<LinearTerm> r;
        try {
          r = eliminate_linear(t, {"x", "y"}, ctx, dir);
        } catch (const EliminationError&) {
          continue;
        }
        ++calls, ++linear;
        std::vector<LinearTerm> used;
        for (const auto& u : r.used) used.push_back(ctx[u.index].term);
        auto with = [&](std::vector<LinearTerm> prem) {
          prem.push_back(dir == Direction::refinement ? r.term : t);
          const LinearTerm& goal = dir == Direction::refinement ? t : r.term;
          return implies_linear(prem, goal) && !oracle::sampled_counterexample(prem, goal, rng, 100);
        };
        bool ok = with(used);
        for (std::size_t k = 0; ok && k < used.size(); ++k) {
          auto less = used;
          less.erase(less.begin() + static_cast<std::ptrdiff_t>(k));
          if (with(less)) ok = false;
        }
        bad += !ok;
      } else {
        const std::vector<std::string> vars{"a", "b", "c", "d", "e"};
        std::vector<Entry<PropTerm>> ctx;
        for (int k = nctx(rng); k > 0; --k) ctx.push_back({id(ctx.size()), oracle::random_prop(rng, vars, 2)});
        PropTerm t = oracle::random_prop(rng, vars, 2);
        EliminationResult<PropTerm> r;
        try {
          r = eliminate_prop(t, {"a", "b"}, ctx, dir);
        } catch (const EliminationError&) {
          continue;
        }
        ++calls, ++prop;
        std::vector<PropTerm> used;
        for (const auto& u : r.used) used.push_back(ctx[u.index].term);
        auto with = [&](std::vector<PropTerm> prem) {
          prem.push_back(dir == Direction::refinement ? r.term : t);
          return oracle::tt_implies(prem, dir == Direction::refinement ? t : r.term);
        };
        bool ok = with(used);
        for (std::size_t k = 0; ok && k < used.size(); ++k) {
          auto less = used;
          less.erase(less.begin() + static_cast<std::ptrdiff_t>(k));
          if (with(less)) ok = false;
        }
        bad += !ok;
      }
    }
    detail << calls << " calls (" << linear << " linear, " << prop << " prop), " << bad << " violations";
    return calls >= kEliminationCalls && bad == 0 && linear > 0 && prop > 0;
  });

  run(7, "Status trichotomy truth table", kExampleLimit, [](std::ostringstream& detail) {
    auto c = make_contract<PropTheory>("C", {"x"}, {"y"}, {"x"}, {"y"});
    int agree = 0;
    for (bool x : {false, true})
      for (bool y : {false, true}) {
        Status expected = !x ? Status::idle : (y ? Status::active : Status::fail);
        agree += evaluate_status(c, {{"x", x}, {"y", y}}).status == expected;
      }
    detail << agree << "/4 rows agree";
    return agree == 4;
  });

  return failures;
}
