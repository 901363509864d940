#pragma once

#include "contract_diag/elimination.hpp"
#include "contract_diag/error.hpp"
#include "contract_diag/prop_implication.hpp"
#include "contract_diag/prop_term.hpp"
#include "contract_diag/term_id.hpp"

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

namespace contract_diag {

namespace detail {

// Guards against resolution chains whose terms double at every step.
inline constexpr std::size_t kMaxTermChars = 1 << 16;

/// If `s` is `x <=> e` or `!x <=> e` (either side) with x absent from e,
/// returns the expression equal to x.
inline std::optional<PropTerm> definition_of(const PropTerm& s, const std::string& x) {
  using K = PropTerm::Kind;
  if (s.kind() != K::equivalence) return std::nullopt;
  for (int side = 0; side < 2; ++side) {
    const PropTerm& v = s.child(side);
    const PropTerm& e = s.child(1 - side);
    if (e.variables().count(x)) continue;
    if (v.kind() == K::var && v.name() == x) return e;
    if (v.kind() == K::negation && v.child(0).kind() == K::var && v.child(0).name() == x)
      return simplify(PropTerm::negate(e));
  }
  return std::nullopt;
}

inline bool intersects(const VarSet& a, const VarSet& b) {
  for (const auto& v : a)
    if (b.count(v)) return true;
  return false;
}

/// Greedy variable-by-variable elimination. Returns the result and the indices
/// of the context terms it used, or nullopt on a dead end.
inline std::optional<std::pair<PropTerm, std::vector<std::size_t>>> prop_eliminate_once(
    const PropTerm& t, const VarSet& elim, std::span<const Entry<PropTerm>> context, Direction dir,
    std::vector<bool> blocked) {
  auto remaining = [&](const PropTerm& u) {
    VarSet out;
    for (const auto& v : u.variables())
      if (elim.count(v)) out.insert(v);
    return out;
  };
  PropTerm term = t;
  std::vector<std::size_t> used;
  for (;;) {
    VarSet rem = remaining(term);
    if (rem.empty()) break;

    if (dir == Direction::refinement) {
      // A single context term that already implies the target discharges it.
      bool discharged = false;
      for (std::size_t i = 0; i < context.size() && !discharged; ++i) {
        if (blocked[i] || !intersects(context[i].term.variables(), rem)) continue;
        try {
          if (implies_prop({context[i].term}, term)) {
            used.push_back(i);
            term = PropTerm::constant(true);
            discharged = true;
          }
        } catch (const CapacityError&) {
        }
      }
      if (discharged) break;
    }

    const std::string x = *rem.begin();
    const int px = polarity(term, x);
    struct Candidate {
      std::size_t index;
      int tier;
    };
    // Tiers are ranked from the variable sets alone; only the chosen
    // candidate is built.
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < context.size(); ++i) {
      if (blocked[i]) continue;
      const PropTerm& s = context[i].term;
      VarSet sv = s.variables();
      if (!sv.count(x)) continue;
      int tier;
      VarSet brought;
      if (auto e = definition_of(s, x)) {
        tier = 0;
        brought = e->variables();
      } else {
        const int ps = polarity(s, x);
        // Relaxation resolves against opposite occurrences; refinement
        // against occurrences of the same sign.
        bool fits = dir == Direction::relaxation ? ((px & 1) && (ps & 2)) || ((px & 2) && (ps & 1))
                                                 : (px & ps) != 0;
        if (!fits) continue;
        tier = 2;
        brought = std::move(sv);
      }
      bool introduces = false;
      for (const auto& v : brought)
        if (v != x && elim.count(v) && !rem.count(v)) introduces = true;
      candidates.push_back({i, tier + (introduces ? 1 : 0)});
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.tier < b.tier; });

    bool stepped = false;
    for (const auto& c : candidates) {
      const PropTerm& s = context[c.index].term;
      PropTerm next;
      if (auto e = definition_of(s, x))
        next = simplify(substitute(term, x, *e));
      else
        next = dir == Direction::relaxation ? exists(x, PropTerm::conj({term, s}))
                                            : forall(x, PropTerm::disj({PropTerm::negate(s), term}));
      if (dir == Direction::relaxation ? next.is_true() : next.is_false()) continue;
      if (next.key().size() > kMaxTermChars) return std::nullopt;
      if (c.tier > 0) blocked[c.index] = true;  // closed definitions stay reusable
      if (std::find(used.begin(), used.end(), c.index) == used.end()) used.push_back(c.index);
      term = std::move(next);
      stepped = true;
      break;
    }
    if (!stepped) {
      term = dir == Direction::relaxation ? exists(x, term) : forall(x, term);
      if (dir == Direction::refinement && term.is_false()) return std::nullopt;
    }
  }
  if (dir == Direction::relaxation && term.is_true()) used.clear();
  return std::make_pair(term, used);
}

inline bool prop_elimination_sound(const PropTerm& t, const PropTerm& result, std::vector<PropTerm> premises,
                                   Direction dir) {
  if (dir == Direction::refinement) {
    premises.push_back(result);
    return implies_prop(premises, t);
  }
  premises.push_back(t);
  return implies_prop(premises, result);
}

}  // namespace detail

/// Eliminates `elim` from `t` by resolution, substitution of definitions and,
/// as a last resort, plain quantification. The `used` list is minimal.
inline EliminationResult<PropTerm> eliminate_prop(const PropTerm& t, const VarSet& elim,
                                                  std::span<const Entry<PropTerm>> context, Direction dir) {
  if (!detail::intersects(t.variables(), elim)) return {t, {}};
  auto found = detail::prop_eliminate_once(t, elim, context, dir, std::vector<bool>(context.size(), false));
  if (!found) throw EliminationError("cannot eliminate variables from '" + render(t) + "' with the given context");
  auto& [result, used] = *found;
  // Drop every term the directional implication does not need.
  for (std::size_t k = 0; k < used.size();) {
    std::vector<PropTerm> rest;
    for (std::size_t j = 0; j < used.size(); ++j)
      if (j != k) rest.push_back(context[used[j]].term);
    bool sound = false;
    try {
      sound = detail::prop_elimination_sound(t, result, rest, dir);
    } catch (const CapacityError&) {
    }
    if (sound)
      used.erase(used.begin() + static_cast<std::ptrdiff_t>(k));
    else
      ++k;
  }
  EliminationResult<PropTerm> out{result, {}};
  for (auto i : used) out.used.push_back(context[i].id);
  return out;
}

inline EliminationResult<PropTerm> eliminate_by_refinement_prop(const PropTerm& t, const VarSet& elim,
                                                                std::span<const Entry<PropTerm>> context) {
  return eliminate_prop(t, elim, context, Direction::refinement);
}

inline EliminationResult<PropTerm> eliminate_by_relaxation_prop(const PropTerm& t, const VarSet& elim,
                                                                std::span<const Entry<PropTerm>> context) {
  return eliminate_prop(t, elim, context, Direction::relaxation);
}

}  // namespace contract_diag
