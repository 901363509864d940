#pragma once

#include "contract_diag/elimination.hpp"
#include "contract_diag/error.hpp"
#include "contract_diag/linear_implication.hpp"
#include "contract_diag/linear_term.hpp"
#include "contract_diag/term_id.hpp"

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

namespace contract_diag {

namespace detail {

/// Depth-first search over single-variable Fourier-Motzkin steps. Each step
/// removes the lexicographically smallest remaining variable of `elim` by a
/// positive combination with one unused context term. Candidates that
/// introduce no new eliminable variables are tried first, then context order.
class LinearEliminator {
 public:
  LinearEliminator(const VarSet& elim, std::span<const Entry<LinearTerm>> context, Direction dir,
                   const std::vector<bool>& excluded)
      : elim_(elim), context_(context), dir_(dir), used_mask_(excluded) {}

  std::optional<std::pair<LinearTerm, std::vector<std::size_t>>> run(const LinearTerm& t) {
    std::vector<std::size_t> used;
    return dfs(t, used);
  }

 private:
  static constexpr std::size_t kNodeBudget = 20000;

  VarSet remaining(const LinearTerm& t) const {
    VarSet out;
    for (const auto& [v, c] : t.coefficients())
      if (elim_.count(v)) out.insert(v);
    return out;
  }

  std::optional<std::pair<LinearTerm, std::vector<std::size_t>>> dfs(const LinearTerm& t,
                                                                      std::vector<std::size_t>& used) {
    if (++nodes_ > kNodeBudget) return std::nullopt;
    if (t.is_false()) return std::nullopt;
    VarSet rem = remaining(t);
    if (rem.empty()) {
      // Relaxing to TRUE through context says nothing; treat it as a dead end.
      if (dir_ == Direction::relaxation && t.is_true() && !used.empty()) return std::nullopt;
      return std::make_pair(t, used);
    }
    const std::string& x = *rem.begin();
    Rational cx = t.coefficient(x);

    struct Candidate {
      std::size_t index;
      int tier;
      LinearTerm next;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < context_.size(); ++i) {
      if (used_mask_[i]) continue;
      const LinearTerm& s = context_[i].term;
      Rational cs = s.coefficient(x);
      if (cs == 0) continue;
      bool same_sign = (cx > 0) == (cs > 0);
      LinearTerm next;
      if (dir_ == Direction::refinement) {
        if (!same_sign) continue;
        next = t.combine(1, s, -(cx / cs));
      } else {
        if (same_sign) continue;
        next = t.combine(1, s, -(cx / cs));
      }
      VarSet after = remaining(next);
      bool introduces = false;
      for (const auto& v : after)
        if (!rem.count(v)) introduces = true;
      candidates.push_back({i, introduces ? 1 : 0, std::move(next)});
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.tier < b.tier; });

    for (auto& c : candidates) {
      used_mask_[c.index] = true;
      used.push_back(c.index);
      auto r = dfs(c.next, used);
      if (r) return r;
      used.pop_back();
      used_mask_[c.index] = false;
    }
    return std::nullopt;
  }

  const VarSet& elim_;
  std::span<const Entry<LinearTerm>> context_;
  Direction dir_;
  std::vector<bool> used_mask_;
  std::size_t nodes_ = 0;
};

inline bool linear_elimination_sound(const LinearTerm& t, const LinearTerm& result,
                                     const std::vector<LinearTerm>& used_terms, Direction dir) {
  std::vector<LinearTerm> premises = used_terms;
  if (dir == Direction::refinement) {
    premises.push_back(result);
    return implies_linear(premises, t);
  }
  premises.push_back(t);
  return implies_linear(premises, result);
}

}  // namespace detail

/// Eliminates `elim` from `t` using positive combinations with context terms.
/// Context order is the priority among equally applicable terms. Each term in
/// the returned `used` list is needed for the directional implication.
inline EliminationResult<LinearTerm> eliminate_linear(const LinearTerm& t, const VarSet& elim,
                                                      std::span<const Entry<LinearTerm>> context, Direction dir) {
  bool touches = false;
  for (const auto& [v, c] : t.coefficients())
    if (elim.count(v)) touches = true;
  if (!touches) return {t, {}};

  auto found = detail::LinearEliminator(elim, context, dir, std::vector<bool>(context.size(), false)).run(t);
  if (!found) throw EliminationError("cannot eliminate variables from '" + render(t) + "' with the given context");
  auto& [result, used] = *found;
  // Drop every term the directional implication does not need.
  for (std::size_t k = 0; k < used.size();) {
    std::vector<LinearTerm> rest;
    for (std::size_t j = 0; j < used.size(); ++j)
      if (j != k) rest.push_back(context[used[j]].term);
    if (detail::linear_elimination_sound(t, result, rest, dir))
      used.erase(used.begin() + static_cast<std::ptrdiff_t>(k));
    else
      ++k;
  }
  EliminationResult<LinearTerm> out{result, {}};
  for (auto i : used) out.used.push_back(context[i].id);
  return out;
}

inline EliminationResult<LinearTerm> eliminate_by_refinement_linear(const LinearTerm& t, const VarSet& elim,
                                                                    std::span<const Entry<LinearTerm>> context) {
  return eliminate_linear(t, elim, context, Direction::refinement);
}

inline EliminationResult<LinearTerm> eliminate_by_relaxation_linear(const LinearTerm& t, const VarSet& elim,
                                                                    std::span<const Entry<LinearTerm>> context) {
  return eliminate_linear(t, elim, context, Direction::relaxation);
}

}  // namespace contract_diag
