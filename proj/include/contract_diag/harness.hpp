#pragma once

#include "contract_diag/diagnostics.hpp"
#include "contract_diag/system_io.hpp"
#include "contract_diag/theory.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <type_traits>
#include <string>
#include <vector>

namespace contract_diag {

namespace detail {

/// Draws in [0, n) straight from the engine so streams are identical across
/// standard libraries.
inline std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }
inline long pick_range(std::mt19937_64& rng, long lo, long hi) {
  return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[pick(rng, i)]);
}

inline std::string random_prop_function(std::mt19937_64& rng, const std::vector<std::string>& in) {
  if (in.size() == 1) return pick(rng, 3) == 0 ? "!" + in[0] : in[0];
  const auto& a = in[0];
  const auto& b = in[1];
  switch (pick(rng, 6)) {
    case 0: return a + " & " + b;
    case 1: return a + " | " + b;
    case 2: return a + " <=> " + b;
    case 3: return "!(" + a + " & " + b + ")";
    case 4: return a + " & !" + b;
    default: return "!" + a + " | " + b;
  }
}

}  // namespace detail

/// Random DAG-wired system with 3..8 components. Linear systems bound every
/// system input to [0, H] and give each output one guarantee `a*y <= b*u + d`
/// per input (positive a, b). Propositional systems give each output one
/// equivalence over its data inputs plus an environment flag assumed off.
inline SystemSpec gen_system(std::uint64_t seed, int n_components, const std::string& theory) {
  if (n_components < 3 || n_components > 8)
    throw std::invalid_argument("gen_system: n_components must be in 3..8, got " + std::to_string(n_components));
  if (theory != "linear" && theory != "prop") throw std::invalid_argument("gen_system: unknown theory '" + theory + "'");
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(n_components));

  for (int attempt = 0; attempt < 100; ++attempt) {
    SystemSpec spec;
    spec.theory = theory;
    std::vector<std::string> outputs;
    std::map<std::string, Rational> max_of;  // linear: upper bound of each variable
    for (int k = 0; k < n_components; ++k) {
      ComponentSpec c;
      c.name = "C" + std::to_string(k);
      std::string y = "y" + std::to_string(k);
      c.outputs = {y};
      std::size_t arity = 1 + detail::pick(rng, 2);
      std::vector<std::string> data;
      for (std::size_t i = 0; i < arity; ++i) {
        std::string u;
        if (!outputs.empty() && detail::pick(rng, 10) < 7) {
          u = outputs[detail::pick(rng, outputs.size())];
        } else {
          u = "x" + std::to_string(k) + "_" + std::to_string(i);
        }
        if (std::find(data.begin(), data.end(), u) == data.end()) data.push_back(u);
      }
      c.inputs = data;
      if (theory == "linear") {
        Rational y_max = 0;
        bool first = true;
        for (const auto& u : data) {
          if (u[0] == 'x') {
            long h = detail::pick_range(rng, 1, 4);
            c.assumptions.push_back(u + " >= 0");
            c.assumptions.push_back(u + " <= " + std::to_string(h));
            max_of[u] = h;
          } else {
            // Slack above the producer's reachable maximum.
            Rational bound = max_of.at(u) + detail::pick_range(rng, 0, 2);
            c.assumptions.push_back(u + " <= " + to_string(bound));
          }
          long a = detail::pick_range(rng, 1, 3), b = detail::pick_range(rng, 1, 3), d = detail::pick_range(rng, 0, 3);
          auto scaled = [](long k, const std::string& v) { return k == 1 ? v : std::to_string(k) + "*" + v; };
          c.guarantees.push_back(scaled(a, y) + " <= " + scaled(b, u) + " + " + std::to_string(d));
          Rational g_max = (Rational(b) * max_of.at(u) + d) / a;
          // The loosest bound, so refining with any single guarantee succeeds.
          if (first || g_max > y_max) y_max = g_max;
          first = false;
        }
        max_of[y] = y_max;
      } else {
        std::string env = "e" + std::to_string(k);
        c.inputs.push_back(env);
        c.assumptions.push_back("!" + env);
        c.guarantees.push_back(y + " <=> " + detail::random_prop_function(rng, data));
      }
      outputs.push_back(y);
      spec.composition_order.push_back(c.name);
      spec.components.push_back(std::move(c));
    }
    try {
      validate(spec);
      if (theory == "linear") {
        build_system(to_order<LinearTheory>(spec));
      } else {
        build_system(to_order<PropTheory>(spec));
      }
      return spec;
    } catch (const Error&) {
    }
  }
  throw std::runtime_error("gen_system: no composable system after 100 attempts");
}

namespace detail {

inline std::vector<Rational> candidate_values(const LinearTerm& t, const std::string& var,
                                              const Valuation<Rational>& partial) {
  Rational c = t.coefficient(var);
  if (c == 0) return {};
  Rational rest = 0;
  for (const auto& [v, k] : t.coefficients()) {
    if (v == var) continue;
    auto it = partial.find(v);
    if (it == partial.end()) return {};
    rest += k * it->second;
  }
  Rational edge = (t.bound() - rest) / c;
  std::vector<Rational> out;
  for (Rational off : {Rational(0), Rational(1, 2), Rational(-1, 2), Rational(1), Rational(-1), Rational(2),
                       Rational(-2), Rational(4), Rational(8)})
    out.push_back(edge + off);
  return out;
}

inline std::vector<bool> candidate_values(const PropTerm&, const std::string&, const Valuation<bool>&) {
  return {false, true};
}

template <typename Value>
std::vector<Value> default_values() {
  if constexpr (std::is_same_v<Value, bool>) {
    return {false, true};
  } else {
    return {Rational(0), Rational(1), Rational(2), Rational(-1)};
  }
}

enum class Want { hold, free, violate_one };

/// Backtracking over a small value grid: assigns `vars` so that every term of
/// `terms` holds (`hold`), at least the `victim` term fails (`violate_one`),
/// or anything goes (`free`).
template <typename Theory>
bool sample(const std::vector<std::string>& vars, const std::vector<typename Theory::term_type>& terms, Want want,
            std::optional<std::size_t> victim, Valuation<typename Theory::value_type>& val, std::mt19937_64& rng,
            std::size_t& budget, const Valuation<typename Theory::value_type>* reference = nullptr,
            std::size_t depth = 0) {
  using Value = typename Theory::value_type;
  auto complete = [&](const typename Theory::term_type& t) {
    for (const auto& v : Theory::variables(t))
      if (!val.count(v)) return false;
    return true;
  };
  if (depth == vars.size()) {
    if (want == Want::violate_one) return !Theory::evaluate(terms[*victim], val);
    return true;
  }
  if (budget == 0) return false;
  --budget;
  const auto& var = vars[depth];
  std::vector<Value> cands = default_values<Value>();
  for (const auto& t : terms)
    for (const auto& c : candidate_values(t, var, val)) cands.push_back(c);
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  shuffle(cands, rng);
  if (reference && reference->count(var)) {
    const auto& r = reference->at(var);
    if (std::find(cands.begin(), cands.end(), r) == cands.end()) cands.push_back(r);
    auto distance = [&](const Value& c) {
      if constexpr (std::is_same_v<Value, bool>) {
        return Rational(c == r ? 0 : 1);
      } else {
        return Rational(abs(c - r));
      }
    };
    std::stable_sort(cands.begin(), cands.end(),
                     [&](const Value& a, const Value& b) { return distance(a) < distance(b); });
  }
  for (const auto& c : cands) {
    val[var] = c;
    bool ok = true;
    if (want == Want::hold) {
      for (const auto& t : terms)
        if (Theory::variables(t).count(var) && complete(t) && !Theory::evaluate(t, val)) ok = false;
    } else if (want == Want::violate_one) {
      const auto& t = terms[*victim];
      if (Theory::variables(t).count(var) && complete(t) && Theory::evaluate(t, val)) ok = false;
    }
    if (ok && sample<Theory>(vars, terms, want, victim, val, rng, budget, reference, depth + 1)) return true;
    val.erase(var);
  }
  return false;
}

/// Components in data-flow order; nullopt on a cycle.
template <typename Theory>
std::optional<std::vector<std::size_t>> topological(const CompositionOrder<Theory>& order) {
  std::map<std::string, std::size_t> producer;
  for (std::size_t i = 0; i < order.contracts.size(); ++i)
    for (const auto& o : order.contracts[i].outputs()) producer[o] = i;
  std::vector<std::size_t> out;
  std::vector<int> state(order.contracts.size(), 0);
  std::function<bool(std::size_t)> visit = [&](std::size_t i) {
    if (state[i] == 2) return true;
    if (state[i] == 1) return false;
    state[i] = 1;
    for (const auto& in : order.contracts[i].inputs()) {
      auto it = producer.find(in);
      if (it != producer.end() && !visit(it->second)) return false;
    }
    state[i] = 2;
    out.push_back(i);
    return true;
  };
  for (std::size_t i = 0; i < order.contracts.size(); ++i)
    if (!visit(i)) return std::nullopt;
  return out;
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ (b + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2));
  x ^= x >> 31;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 29;
  return x;
}

inline std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : s) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
  return h;
}

/// One forward pass: system inputs, then each component in data-flow order.
/// With a reference, every variable takes the consistent value nearest to its
/// reference value, so a replay with fewer targets changes as little as it can.
template <typename Theory>
std::optional<Valuation<typename Theory::value_type>> simulate(const CompositionOrder<Theory>& order,
                                                                const SystemBuild<Theory>& build,
                                                                const std::vector<std::size_t>& topo,
                                                                std::uint64_t seed,
                                                                const std::set<std::string>& targets,
                                                                const Valuation<typename Theory::value_type>* reference = nullptr) {
  using Term = typename Theory::term_type;
  Valuation<typename Theory::value_type> val;
  std::mt19937_64 input_rng(mix(seed, 1));
  std::vector<std::string> inputs(build.system.inputs().begin(), build.system.inputs().end());
  VarSet produced;
  for (const auto& c : order.contracts) produced.insert(c.outputs().begin(), c.outputs().end());
  for (const auto& c : order.contracts)
    for (const auto& v : c.inputs())
      if (!produced.count(v) && std::find(inputs.begin(), inputs.end(), v) == inputs.end()) inputs.push_back(v);
  std::size_t budget = 20000;
  auto sys_a = build.system.assumption_terms();
  if (!sample<Theory>(inputs, sys_a, Want::hold, std::nullopt, val, input_rng, budget, reference))
    return std::nullopt;

  for (std::size_t i : topo) {
    const auto& c = order.contracts[i];
    std::mt19937_64 rng(mix(seed, name_hash(c.name())));
    bool assumptions_hold = true;
    for (const auto& a : c.assumptions())
      if (!Theory::evaluate(a.term, val)) assumptions_hold = false;
    bool target = targets.count(c.name()) > 0;
    // Independence: a target's environment must be intact.
    if (target && !assumptions_hold) return std::nullopt;
    std::vector<std::string> outs(c.outputs().begin(), c.outputs().end());
    std::vector<Term> gs = c.guarantee_terms();
    budget = 20000;
    bool ok;
    if (target) {
      if (gs.empty()) return std::nullopt;
      ok = sample<Theory>(outs, gs, Want::violate_one, pick(rng, gs.size()), val, rng, budget, reference);
    } else if (assumptions_hold) {
      ok = sample<Theory>(outs, gs, Want::hold, std::nullopt, val, rng, budget, reference);
    } else {
      ok = sample<Theory>(outs, gs, Want::free, std::nullopt, val, rng, budget, reference);
    }
    if (!ok) return std::nullopt;
  }
  return val;
}

template <typename Theory>
std::set<TermId> violated_system_guarantees(const SystemBuild<Theory>& build,
                                            const Valuation<typename Theory::value_type>& val) {
  std::set<TermId> out;
  for (const auto& g : build.system.guarantees())
    if (!Theory::evaluate(g.term, val)) out.insert(g.id);
  return out;
}

}  // namespace detail

struct InjectOptions {
  /// Forward simulations tried before giving up.
  std::size_t attempts = 64;
};

/// Complete valuation in which exactly `targets` have FAIL status, every
/// target's assumptions hold, the system assumptions hold and some system
/// guarantee is violated. Returns nullopt (no witness) when the search runs
/// out, e.g. because one target necessarily breaks another's assumptions or
/// a target's fault never reaches a system guarantee. Each target must witness
/// some violated system guarantee on its own: the guarantee stays violated
/// when only that target misbehaves and clears when only that target is
/// repaired. Faults that cancel or only matter jointly are rejected.
template <typename Theory>
std::optional<Valuation<typename Theory::value_type>> inject_fault(const CompositionOrder<Theory>& order,
                                                                    const SystemBuild<Theory>& build,
                                                                    std::uint64_t log_seed,
                                                                    const std::set<std::string>& targets,
                                                                    const InjectOptions& opts = {}) {
  if (targets.empty()) throw std::invalid_argument("inject_fault: targets must be non-empty");
  for (const auto& t : targets)
    if (!build.position.count(t)) throw std::invalid_argument("inject_fault: unknown component '" + t + "'");
  auto topo = detail::topological(order);
  if (!topo) return std::nullopt;
  for (std::size_t attempt = 0; attempt < opts.attempts; ++attempt) {
    std::uint64_t seed = detail::mix(log_seed, attempt);
    auto val = detail::simulate(order, build, *topo, seed, targets);
    if (!val) continue;
    auto violated = detail::violated_system_guarantees(build, *val);
    if (violated.empty()) continue;
    auto statuses = component_statuses(order, *val);
    bool exact = true;
    for (const auto& [name, st] : statuses)
      if ((st.status == Status::fail) != (targets.count(name) > 0)) exact = false;
    if (!exact) continue;
    bool manifest = true;
    for (const auto& t : targets) {
      auto rest = targets;
      rest.erase(t);
      auto repaired = detail::simulate(order, build, *topo, seed, rest, &*val);
      auto alone = detail::simulate(order, build, *topo, seed, {t}, &*val);
      if (!repaired || !alone) {
        manifest = false;
        break;
      }
      auto without = detail::violated_system_guarantees(build, *repaired);
      auto with_only = detail::violated_system_guarantees(build, *alone);
      bool witnessed = false;
      for (const auto& g : violated)
        if (!without.count(g) && with_only.count(g)) witnessed = true;
      if (!witnessed) manifest = false;
    }
    if (manifest) return val;
  }
  return std::nullopt;
}

template <typename Theory>
std::optional<Valuation<typename Theory::value_type>> inject_fault(const SystemSpec& spec, std::uint64_t log_seed,
                                                                    const std::set<std::string>& targets,
                                                                    const InjectOptions& opts = {}) {
  auto order = to_order<Theory>(spec);
  auto build = build_system(order);
  return inject_fault(order, build, log_seed, targets, opts);
}

/// Single-row CSV with columns sorted by name.
template <typename Theory>
std::string log_to_csv(const Valuation<typename Theory::value_type>& val) {
  std::string header, row;
  for (const auto& [k, v] : val) {
    header += (header.empty() ? "" : ",") + k;
    row += (row.empty() ? "" : ",") + Theory::value_to_string(v);
  }
  return header + "\n" + row + "\n";
}

}  // namespace contract_diag
