#pragma once

#include "contract_diag/contract.hpp"
#include "contract_diag/error.hpp"
#include "contract_diag/graph.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace contract_diag {

template <typename Theory>
struct CompositionResult {
  Contract<Theory> contract;
  CompositionGraph graph;
};

namespace detail {

template <typename Term>
struct Produced {
  Term term;
  std::vector<TermId> sources;  // stem origin first, then used context terms
};

template <typename Theory>
void append_unique(std::vector<Produced<typename Theory::term_type>>& out,
                   Produced<typename Theory::term_type> p) {
  for (auto& q : out) {
    if (q.term == p.term) {
      for (const auto& s : p.sources)
        if (std::find(q.sources.begin(), q.sources.end(), s) == q.sources.end()) q.sources.push_back(s);
      return;
    }
  }
  out.push_back(std::move(p));
}

/// Terms of `pool` (other than `self`) connected to `self` through shared
/// variables.
template <typename Theory>
std::vector<typename Theory::term_type> variable_cone(const std::vector<Produced<typename Theory::term_type>>& pool,
                                                      const std::vector<bool>& alive, std::size_t self) {
  std::vector<VarSet> vars(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (alive[i]) vars[i] = Theory::variables(pool[i].term);
  VarSet frontier = vars[self];
  std::vector<bool> taken(pool.size(), false);
  taken[self] = true;
  std::vector<typename Theory::term_type> out;
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (taken[i] || !alive[i]) continue;
      bool touches = false;
      for (const auto& v : vars[i])
        if (frontier.count(v)) touches = true;
      if (!touches) continue;
      taken[i] = true;
      grew = true;
      frontier.insert(vars[i].begin(), vars[i].end());
      out.push_back(pool[i].term);
    }
  }
  return out;
}

/// Removes, from the back, every term implied by the remaining ones.
template <typename Theory>
void prune_redundant(std::vector<Produced<typename Theory::term_type>>& terms) {
  std::vector<bool> alive(terms.size(), true);
  for (std::size_t k = terms.size(); k-- > 0;) {
    auto cone = variable_cone<Theory>(terms, alive, k);
    if (cone.empty()) continue;
    bool implied = false;
    try {
      implied = Theory::implies(cone, terms[k].term);
    } catch (const CapacityError&) {
    }
    if (implied) alive[k] = false;
  }
  std::vector<Produced<typename Theory::term_type>> kept;
  for (std::size_t k = 0; k < terms.size(); ++k)
    if (alive[k]) kept.push_back(std::move(terms[k]));
  terms = std::move(kept);
}

}  // namespace detail

/// Composes two contracts. Connection variables not in `keep` are hidden.
/// Assumptions mentioning non-inputs are refined with the other operand's
/// guarantees and assumptions; guarantees mentioning hidden variables are
/// relaxed with all operand terms, and dropped when no informative relaxation
/// exists. Result terms are owned by `label`.
template <typename Theory>
CompositionResult<Theory> compose(const Contract<Theory>& c1, const Contract<Theory>& c2, const VarSet& keep,
                                  const std::string& label) {
  using Term = typename Theory::term_type;
  using TermEntry = Entry<Term>;

  for (const auto& v : c1.outputs())
    if (c2.outputs().count(v))
      throw CompositionError("cannot compose '" + c1.name() + "' and '" + c2.name() + "': both output '" + v + "'");

  VarSet all, outputs_union, inputs, outputs, internal;
  for (const auto* c : {&c1, &c2}) {
    all.insert(c->inputs().begin(), c->inputs().end());
    all.insert(c->outputs().begin(), c->outputs().end());
    outputs_union.insert(c->outputs().begin(), c->outputs().end());
  }
  for (const auto* c : {&c1, &c2})
    for (const auto& v : c->inputs())
      if (!outputs_union.count(v)) inputs.insert(v);
  for (const auto& v : c1.outputs())
    if (c2.inputs().count(v) && !keep.count(v)) internal.insert(v);
  for (const auto& v : c2.outputs())
    if (c1.inputs().count(v) && !keep.count(v)) internal.insert(v);
  for (const auto& v : outputs_union)
    if (!internal.count(v)) outputs.insert(v);
  VarSet non_inputs;
  for (const auto& v : all)
    if (!inputs.count(v)) non_inputs.insert(v);

  auto touches = [](const Term& t, const VarSet& set) {
    for (const auto& v : Theory::variables(t))
      if (set.count(v)) return true;
    return false;
  };

  // Assumptions: stem terms, refined against the other operand.
  std::vector<detail::Produced<Term>> assumptions;
  for (int side = 0; side < 2; ++side) {
    const Contract<Theory>& self = side == 0 ? c1 : c2;
    const Contract<Theory>& other = side == 0 ? c2 : c1;
    std::vector<TermEntry> context = other.guarantees();
    context.insert(context.end(), other.assumptions().begin(), other.assumptions().end());
    for (const auto& a : self.assumptions()) {
      if (!touches(a.term, non_inputs)) {
        detail::append_unique<Theory>(assumptions, {a.term, {a.id}});
        continue;
      }
      EliminationResult<Term> r;
      try {
        r = Theory::eliminate(a.term, non_inputs, context, Direction::refinement);
      } catch (const EliminationError& e) {
        throw CompositionError("composing '" + c1.name() + "' and '" + c2.name() + "': assumption " + a.id.str() +
                               " '" + Theory::render(a.term) + "' cannot be expressed over inputs: " + e.what());
      }
      if (Theory::is_false(r.term))
        throw CompositionError("composing '" + c1.name() + "' and '" + c2.name() + "': assumption " + a.id.str() +
                               " is unsatisfiable after elimination");
      if (Theory::is_true(r.term)) continue;
      std::vector<TermId> sources{a.id};
      sources.insert(sources.end(), r.used.begin(), r.used.end());
      detail::append_unique<Theory>(assumptions, {r.term, std::move(sources)});
    }
  }

  // Guarantees: stem terms, relaxed to hide internal variables.
  std::vector<TermEntry> pool = c1.guarantees();
  pool.insert(pool.end(), c2.guarantees().begin(), c2.guarantees().end());
  const std::size_t guarantee_count = pool.size();
  pool.insert(pool.end(), c1.assumptions().begin(), c1.assumptions().end());
  pool.insert(pool.end(), c2.assumptions().begin(), c2.assumptions().end());
  std::vector<detail::Produced<Term>> guarantees;
  for (std::size_t k = 0; k < guarantee_count; ++k) {
    const TermEntry& g = pool[k];
    if (!touches(g.term, internal)) {
      detail::append_unique<Theory>(guarantees, {g.term, {g.id}});
      continue;
    }
    std::vector<TermEntry> context;
    for (std::size_t j = 0; j < pool.size(); ++j)
      if (j != k) context.push_back(pool[j]);
    std::optional<EliminationResult<Term>> r;
    try {
      r = Theory::eliminate(g.term, internal, context, Direction::relaxation);
    } catch (const EliminationError&) {
    }
    if (!r || Theory::is_true(r->term)) continue;
    std::vector<TermId> sources{g.id};
    sources.insert(sources.end(), r->used.begin(), r->used.end());
    detail::append_unique<Theory>(guarantees, {r->term, std::move(sources)});
  }

  detail::prune_redundant<Theory>(assumptions);
  detail::prune_redundant<Theory>(guarantees);

  CompositionGraph graph;
  for (const auto* c : {&c1, &c2}) {
    for (const auto& e : c->assumptions()) graph.add_vertex(e.id, Theory::render(e.term));
    for (const auto& e : c->guarantees()) graph.add_vertex(e.id, Theory::render(e.term));
  }
  auto emit = [&](std::vector<detail::Produced<Term>>& produced, Section section) {
    std::vector<TermEntry> out;
    for (auto& p : produced) {
      TermId id{label, section, out.size()};
      graph.add_vertex(id, Theory::render(p.term));
      for (const auto& s : p.sources) graph.add_edge(s, id);
      out.push_back({id, std::move(p.term)});
    }
    return out;
  };
  auto a_out = emit(assumptions, Section::assumption);
  auto g_out = emit(guarantees, Section::guarantee);
  return {Contract<Theory>(label, std::move(inputs), std::move(outputs), std::move(a_out), std::move(g_out)),
          std::move(graph)};
}

}  // namespace contract_diag
