#pragma once

#include "contract_diag/composition.hpp"
#include "contract_diag/contract.hpp"
#include "contract_diag/error.hpp"
#include "contract_diag/graph.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace contract_diag {

/// Contracts in the order they are folded, plus optional per-step keep sets.
/// keep[k] applies to the step that adds contracts[k + 1]; a missing entry
/// keeps every connection variable some later contract still reads.
template <typename Theory>
struct CompositionOrder {
  std::vector<Contract<Theory>> contracts;
  std::vector<std::optional<VarSet>> keep;
};

template <typename Theory>
VarSet keep_for_step(const CompositionOrder<Theory>& order, std::size_t step) {
  if (step < order.keep.size() && order.keep[step]) return *order.keep[step];
  VarSet later_inputs;
  for (std::size_t j = step + 2; j < order.contracts.size(); ++j)
    later_inputs.insert(order.contracts[j].inputs().begin(), order.contracts[j].inputs().end());
  return later_inputs;
}

template <typename Theory>
struct SystemBuild {
  Contract<Theory> system;
  DiagnosticsGraph graph;
  /// prefixes[k] is the composition of contracts[0..k].
  std::vector<Contract<Theory>> prefixes;
  std::map<std::string, std::size_t> position;
};

/// Left fold of the composition order. Stage results are owned by `comp_k`,
/// k being the number of contracts composed so far.
template <typename Theory>
SystemBuild<Theory> build_system(const CompositionOrder<Theory>& order) {
  if (order.contracts.empty()) throw CompositionError("composition order is empty");
  SystemBuild<Theory> out;
  for (std::size_t k = 0; k < order.contracts.size(); ++k) {
    const auto& name = order.contracts[k].name();
    if (!out.position.emplace(name, k).second) throw CompositionError("duplicate component '" + name + "'");
  }
  out.prefixes.push_back(order.contracts.front());
  for (std::size_t k = 1; k < order.contracts.size(); ++k) {
    try {
      auto r = compose(out.prefixes.back(), order.contracts[k], keep_for_step(order, k - 1),
                       "comp_" + std::to_string(k + 1));
      out.graph.merge(r.graph);
      out.prefixes.push_back(std::move(r.contract));
    } catch (const Error& e) {
      throw CompositionError("stage " + std::to_string(k + 1) + " (adding '" + order.contracts[k].name() +
                             "'): " + e.what());
    }
  }
  out.system = out.prefixes.back();
  return out;
}

struct MapEntry {
  TermId term;
  std::string component;
  bool operator==(const MapEntry&) const = default;
};

/// Component-level terms with a provenance path to `s`, ordered by position
/// in the composition order, then section, then index.
template <typename Theory>
std::vector<MapEntry> diagnostics_map(const DiagnosticsGraph& graph, const SystemBuild<Theory>& build,
                                      const TermId& s) {
  std::set<TermId> leaves;
  if (graph.contains(s)) {
    leaves = graph.leaves_reaching(s);
  } else if (build.position.count(s.owner)) {
    leaves = {s};
  } else {
    throw DiagnosisError("unknown term " + s.str());
  }
  std::vector<MapEntry> out;
  for (const auto& t : leaves)
    if (build.position.count(t.owner)) out.push_back({t, t.owner});
  std::stable_sort(out.begin(), out.end(), [&](const MapEntry& a, const MapEntry& b) {
    auto pa = build.position.at(a.component), pb = build.position.at(b.component);
    if (pa != pb) return pa < pb;
    return a.term < b.term;
  });
  return out;
}

struct Evaluation {
  TermId id;
  std::string text;
  bool satisfied = false;
};

struct TraceStep;

struct AssumptionVisit {
  TermId id;
  bool satisfied = false;
  std::vector<TermId> causes;
  bool low_confidence = false;
  bool used_suffix = false;
  std::vector<TraceStep> traces;
};

struct LeafVisit {
  TermId leaf;
  std::string component;
  /// "evaluated", "repeat" (already seen), or "skipped" (assumption leaf).
  std::string action;
  bool satisfied = true;
  bool faulty = false;
  std::vector<AssumptionVisit> assumptions;
};

struct TraceStep {
  TermId target;
  std::vector<LeafVisit> leaves;
};

struct DiagnosisReport {
  std::vector<TermId> violated_guarantees;
  std::vector<std::string> violated_texts;
  std::set<std::string> faulty_components;
  std::vector<Evaluation> evaluations;
  std::vector<TraceStep> trace;
  std::size_t terms_checked = 0;
  std::size_t terms_total = 0;
  std::vector<std::string> warnings;
  bool low_confidence = false;
};

/// Runs the tracing procedure for one or more violated system guarantees over
/// one log. State is shared across calls so each term is evaluated once.
template <typename Theory>
class Diagnoser {
 public:
  using Term = typename Theory::term_type;
  using Value = typename Theory::value_type;

  Diagnoser(const CompositionOrder<Theory>& order, const SystemBuild<Theory>& build, const Valuation<Value>& log)
      : order_(order), build_(build), log_(log), graph_(build.graph) {
    for (const auto& c : order_.contracts) report_.terms_total += c.term_count();
  }

  /// System guarantees the log violates, after checking system assumptions.
  std::vector<TermId> violated_guarantees() const {
    check_system_assumptions();
    std::vector<TermId> out;
    for (const auto& g : build_.system.guarantees())
      if (!Theory::evaluate(g.term, log_)) out.push_back(g.id);
    return out;
  }

  void diagnose(const TermId& gv) {
    check_system_assumptions();
    const auto* g = build_.system.find(gv);
    if (!g || gv.section != Section::guarantee) throw DiagnosisError(gv.str() + " is not a system-level guarantee");
    if (Theory::evaluate(g->term, log_)) throw DiagnosisError("no violation: " + gv.str() + " holds under the log");
    report_.violated_guarantees.push_back(gv);
    report_.violated_texts.push_back(Theory::render(g->term));
    report_.trace.push_back(trace(gv));
  }

  /// Diagnoses every violated system guarantee; returns how many there were.
  std::size_t diagnose_all() {
    auto violated = violated_guarantees();
    for (const auto& g : violated) diagnose(g);
    return violated.size();
  }

  const DiagnosisReport& report() {
    std::set<TermId> distinct;
    for (const auto& e : report_.evaluations) distinct.insert(e.id);
    report_.terms_checked = distinct.size();
    return report_;
  }

  /// Context terms that a violated assumption of contract `index` was refined
  /// with. Composes the suffix when the contract is first in the order.
  std::vector<TermId> find_cause_for_assumption(const Entry<Term>& av, std::size_t index, bool& low_confidence,
                                                bool& used_suffix) {
    const Contract<Theory>& other = index > 0 ? build_.prefixes[index - 1] : suffix();
    used_suffix = index == 0;
    std::vector<Entry<Term>> context = other.guarantees();
    context.insert(context.end(), other.assumptions().begin(), other.assumptions().end());
    VarSet elim;
    auto collect = [&](const Term& t) {
      for (const auto& v : Theory::variables(t))
        if (!build_.system.inputs().count(v)) elim.insert(v);
    };
    collect(av.term);
    for (const auto& e : context) collect(e.term);
    low_confidence = false;
    try {
      auto r = Theory::eliminate(av.term, elim, context, Direction::refinement);
      if (!r.used.empty()) return r.used;
    } catch (const EliminationError&) {
    }
    low_confidence = true;
    std::vector<TermId> all;
    for (const auto& e : context) all.push_back(e.id);
    return all;
  }

 private:
  void check_system_assumptions() const {
    for (const auto& a : build_.system.assumptions())
      if (!Theory::evaluate(a.term, log_))
        throw DiagnosisError("not a system-level failure: system assumption " + a.id.str() + " '" +
                             Theory::render(a.term) + "' is violated");
  }

  const Contract<Theory>& component(const std::string& name) const {
    return order_.contracts[build_.position.at(name)];
  }

  bool evaluate(const Entry<Term>& e) {
    auto it = verdicts_.find(e.id);
    if (it != verdicts_.end()) return it->second;
    bool ok = Theory::evaluate(e.term, log_);
    verdicts_.emplace(e.id, ok);
    report_.evaluations.push_back({e.id, Theory::render(e.term), ok});
    return ok;
  }

  bool over_system_inputs(const Term& t) const {
    for (const auto& v : Theory::variables(t))
      if (!build_.system.inputs().count(v)) return false;
    return true;
  }

  TraceStep trace(const TermId& target) {
    TraceStep step{target, {}};
    for (const auto& m : diagnostics_map(graph_, build_, target)) {
      const Contract<Theory>& c = component(m.component);
      const Entry<Term>* leaf = c.find(m.term);
      LeafVisit visit{m.term, m.component, "evaluated", true, false, {}};
      if (m.term.section == Section::assumption) {
        visit.action = "skipped";
        if (!over_system_inputs(leaf->term))
          add_warning("assumption leaf " + m.term.str() + " mentions variables other than system inputs");
        step.leaves.push_back(std::move(visit));
        continue;
      }
      if (visited_leaves_.count(m.term)) {
        visit.action = "repeat";
        visit.satisfied = verdicts_.at(m.term);
        step.leaves.push_back(std::move(visit));
        continue;
      }
      visited_leaves_.insert(m.term);
      visit.satisfied = evaluate(*leaf);
      if (!visit.satisfied) {
        std::vector<const Entry<Term>*> violated;
        for (const auto& a : c.assumptions())
          if (!evaluate(a)) violated.push_back(&a);
        if (violated.empty()) {
          visit.faulty = true;
          report_.faulty_components.insert(m.component);
        }
        for (const auto* a : violated) {
          AssumptionVisit av{a->id, false, {}, false, false, {}};
          if (visited_assumptions_.insert(a->id).second) {
            av.causes = find_cause_for_assumption(*a, build_.position.at(m.component), av.low_confidence,
                                                  av.used_suffix);
            if (av.low_confidence) {
              report_.low_confidence = true;
              add_warning("no exact cause found for " + a->id.str() + "; using the whole context");
            }
            if (av.used_suffix) add_warning("cause of " + a->id.str() + " searched in the composition of later contracts");
            for (const auto& cause : av.causes)
              if (traced_.insert(cause).second) av.traces.push_back(trace(cause));
          }
          visit.assumptions.push_back(std::move(av));
        }
      }
      step.leaves.push_back(std::move(visit));
    }
    return step;
  }

  const Contract<Theory>& suffix() {
    if (!suffix_) {
      const auto& cs = order_.contracts;
      if (cs.size() < 2) throw DiagnosisError("no other contract to search for causes");
      Contract<Theory> acc = cs[1];
      VarSet keep = cs[0].inputs();
      for (std::size_t k = 2; k < cs.size(); ++k) {
        VarSet step_keep = keep;
        for (std::size_t j = k + 1; j < cs.size(); ++j) step_keep.insert(cs[j].inputs().begin(), cs[j].inputs().end());
        auto r = compose(acc, cs[k], step_keep, "rest_" + std::to_string(k));
        graph_.merge(r.graph);
        acc = std::move(r.contract);
      }
      suffix_ = std::move(acc);
    }
    return *suffix_;
  }

  void add_warning(const std::string& w) {
    if (std::find(report_.warnings.begin(), report_.warnings.end(), w) == report_.warnings.end())
      report_.warnings.push_back(w);
  }

  const CompositionOrder<Theory>& order_;
  const SystemBuild<Theory>& build_;
  const Valuation<Value>& log_;
  DiagnosticsGraph graph_;
  std::optional<Contract<Theory>> suffix_;
  DiagnosisReport report_;
  std::map<TermId, bool> verdicts_;
  std::set<TermId> visited_leaves_;
  std::set<TermId> visited_assumptions_;
  std::set<TermId> traced_;
};

/// One-shot diagnosis of a single violated system guarantee.
template <typename Theory>
DiagnosisReport diagnose(const TermId& gv, const CompositionOrder<Theory>& order, const SystemBuild<Theory>& build,
                         const Valuation<typename Theory::value_type>& log) {
  Diagnoser<Theory> d(order, build, log);
  d.diagnose(gv);
  return d.report();
}

template <typename Theory>
std::map<std::string, StatusResult> component_statuses(const CompositionOrder<Theory>& order,
                                                       const Valuation<typename Theory::value_type>& log) {
  std::map<std::string, StatusResult> out;
  for (const auto& c : order.contracts) out.emplace(c.name(), evaluate_status(c, log));
  return out;
}

/// Checks every component directly: the components with FAIL status.
template <typename Theory>
std::set<std::string> oracle_diagnose(const CompositionOrder<Theory>& order,
                                      const Valuation<typename Theory::value_type>& log) {
  std::set<std::string> out;
  for (const auto& [name, st] : component_statuses(order, log))
    if (st.status == Status::fail) out.insert(name);
  return out;
}

}  // namespace contract_diag
