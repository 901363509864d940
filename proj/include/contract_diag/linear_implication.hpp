#pragma once

#include "contract_diag/linear_term.hpp"

#include <algorithm>
#include <initializer_list>
#include <map>
#include <set>
#include <span>
#include <vector>

namespace contract_diag {

namespace detail {

/// `sum <= bound` or `sum < bound`, used only inside the feasibility check.
/// Rows are scaled so the first coefficient has magnitude 1; constant rows keep
/// their raw bound so strict `0 < 0` stays distinguishable from `0 < 1`.
struct FmRow {
  std::map<std::string, Rational> coeffs;
  Rational bound = 0;
  bool strict = false;

  FmRow(std::map<std::string, Rational> c, Rational b, bool s) : coeffs(std::move(c)), bound(std::move(b)), strict(s) {
    for (auto it = coeffs.begin(); it != coeffs.end();) {
      if (it->second == 0)
        it = coeffs.erase(it);
      else
        ++it;
    }
    if (!coeffs.empty()) {
      Rational k = abs(coeffs.begin()->second);
      for (auto& [v, x] : coeffs) x /= k;
      bound /= k;
    }
  }

  Rational coefficient(const std::string& v) const {
    auto it = coeffs.find(v);
    return it == coeffs.end() ? Rational(0) : it->second;
  }

  bool operator<(const FmRow& o) const {
    if (coeffs != o.coeffs) return coeffs < o.coeffs;
    if (bound != o.bound) return bound < o.bound;
    return strict < o.strict;
  }
};

/// Exact rational feasibility of a system of non-strict and strict rows by
/// Fourier-Motzkin elimination. Strictness propagates through every
/// combination that involves a strict row.
inline bool fm_feasible(std::vector<FmRow> rows) {
  for (;;) {
    std::set<FmRow> unique;
    for (auto& r : rows) {
      if (r.coeffs.empty()) {
        if (r.strict ? r.bound <= 0 : r.bound < 0) return false;
        continue;
      }
      unique.insert(r);
    }
    rows.assign(unique.begin(), unique.end());
    if (rows.empty()) return true;

    // Pick the variable minimizing the number of generated rows.
    std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
    for (const auto& r : rows)
      for (const auto& [v, c] : r.coeffs) {
        auto& [pos, neg] = counts[v];
        (c > 0 ? pos : neg)++;
      }
    std::string pick;
    std::size_t best = static_cast<std::size_t>(-1);
    for (const auto& [v, pn] : counts) {
      std::size_t cost = (pn.first == 0 || pn.second == 0) ? 0 : pn.first * pn.second;
      if (cost < best) {
        best = cost;
        pick = v;
      }
    }

    std::vector<FmRow> next, pos, neg;
    for (auto& r : rows) {
      Rational c = r.coefficient(pick);
      if (c == 0)
        next.push_back(r);
      else if (c > 0)
        pos.push_back(r);
      else
        neg.push_back(r);
    }
    for (const auto& p : pos) {
      for (const auto& n : neg) {
        Rational cp = p.coefficient(pick);
        Rational cn = -n.coefficient(pick);
        std::map<std::string, Rational> sum;
        for (const auto& [v, c] : p.coeffs) sum[v] += cn * c;
        for (const auto& [v, c] : n.coeffs) sum[v] += cp * c;
        next.emplace_back(std::move(sum), cn * p.bound + cp * n.bound, p.strict || n.strict);
      }
    }
    rows = std::move(next);
  }
}

}  // namespace detail

/// True iff every rational valuation satisfying all of `context` satisfies
/// `t`. Decided exactly: the context together with the strict negation of `t`
/// is checked for infeasibility.
inline bool implies_linear(std::span<const LinearTerm> context, const LinearTerm& t) {
  if (t.is_true()) return true;
  std::vector<detail::FmRow> rows;
  rows.reserve(context.size() + 1);
  for (const auto& k : context) rows.emplace_back(k.coefficients(), k.bound(), false);
  if (!t.is_false()) {
    // not (a.x <= b)  <=>  -a.x < -b
    std::map<std::string, Rational> neg;
    for (const auto& [v, c] : t.coefficients()) neg[v] = -c;
    rows.emplace_back(std::move(neg), -t.bound(), true);
  }
  return !detail::fm_feasible(std::move(rows));
}

inline bool implies_linear(std::initializer_list<LinearTerm> context, const LinearTerm& t) {
  return implies_linear(std::span<const LinearTerm>(context.begin(), context.size()), t);
}

}  // namespace contract_diag
