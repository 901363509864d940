#pragma once

#include "contract_diag/error.hpp"
#include "contract_diag/prop_term.hpp"

#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace contract_diag {

/// Largest number of distinct variables accepted in one propositional query.
inline constexpr std::size_t kPropQueryVariableLimit = 512;

namespace detail {

/// Tseitin encoding into clauses over literals +v / -v, v >= 1.
class Cnf {
 public:
  int literal_for(const PropTerm& t) {
    using K = PropTerm::Kind;
    switch (t.kind()) {
      case K::constant:
        return t.value() ? true_literal() : -true_literal();
      case K::var: {
        auto [it, fresh] = inputs_.try_emplace(t.name(), 0);
        if (fresh) it->second = new_var();
        return it->second;
      }
      case K::negation:
        return -literal_for(t.child(0));
      default:
        break;
    }
    auto cached = gates_.find(t.key());
    if (cached != gates_.end()) return cached->second;
    int g = 0;
    switch (t.kind()) {
      case K::conjunction:
      case K::disjunction: {
        // OR is AND over negated literals with the output negated.
        const bool is_and = t.kind() == K::conjunction;
        std::vector<int> kids;
        for (const auto& c : t.children()) kids.push_back(is_and ? literal_for(c) : -literal_for(c));
        int a = new_var();
        std::vector<int> back{a};
        for (int k : kids) {
          clauses_.push_back({-a, k});
          back.push_back(-k);
        }
        clauses_.push_back(std::move(back));
        g = is_and ? a : -a;
        break;
      }
      case K::implication: {
        int l = literal_for(t.child(0));
        int r = literal_for(t.child(1));
        int a = new_var();  // a <=> (l & !r); result is !a
        clauses_.push_back({-a, l});
        clauses_.push_back({-a, -r});
        clauses_.push_back({a, -l, r});
        g = -a;
        break;
      }
      case K::equivalence: {
        int l = literal_for(t.child(0));
        int r = literal_for(t.child(1));
        g = new_var();
        clauses_.push_back({-g, -l, r});
        clauses_.push_back({-g, l, -r});
        clauses_.push_back({g, l, r});
        clauses_.push_back({g, -l, -r});
        break;
      }
      default:
        break;
    }
    gates_.emplace(t.key(), g);
    return g;
  }

  void assert_literal(int lit) { clauses_.push_back({lit}); }

  int variable_count() const { return vars_; }
  std::size_t input_count() const { return inputs_.size(); }
  const std::map<std::string, int>& inputs() const { return inputs_; }
  std::vector<std::vector<int>>& clauses() { return clauses_; }

 private:
  int new_var() { return ++vars_; }
  int true_literal() {
    if (true_ == 0) {
      true_ = new_var();
      clauses_.push_back({true_});
    }
    return true_;
  }

  int vars_ = 0;
  int true_ = 0;
  std::map<std::string, int> inputs_;
  std::map<std::string, int> gates_;
  std::vector<std::vector<int>> clauses_;
};

/// DPLL with two watched literals and chronological backtracking.
class Dpll {
 public:
  Dpll(int vars, std::vector<std::vector<int>> clauses, std::vector<int> order)
      : clauses_(std::move(clauses)), watches_(2 * (vars + 1)), value_(vars + 1, 0), order_(std::move(order)) {
    for (int v = 1; v <= vars; ++v) order_.push_back(v);
  }

  bool satisfiable() {
    for (std::size_t i = 0; i < clauses_.size(); ++i) {
      auto& c = clauses_[i];
      if (c.empty()) return false;
      if (c.size() == 1) {
        if (value(c[0]) < 0) return false;
        if (value(c[0]) == 0) enqueue(c[0]);
        continue;
      }
      watches_[code(c[0])].push_back(i);
      watches_[code(c[1])].push_back(i);
    }
    struct Level {
      std::size_t trail_size;
      int literal;
      bool flipped;
    };
    std::vector<Level> levels;
    for (;;) {
      if (!propagate()) {
        for (;;) {
          if (levels.empty()) return false;
          Level lv = levels.back();
          levels.pop_back();
          undo(lv.trail_size);
          if (!lv.flipped) {
            levels.push_back({trail_.size(), -lv.literal, true});
            enqueue(-lv.literal);
            break;
          }
        }
        continue;
      }
      int pick = 0;
      while (next_ < order_.size()) {
        int v = order_[next_];
        if (value_[v] == 0) {
          pick = v;
          break;
        }
        ++next_;
      }
      if (pick == 0) return true;
      levels.push_back({trail_.size(), pick, false});
      enqueue(pick);
    }
  }

 private:
  static std::size_t code(int lit) { return 2 * static_cast<std::size_t>(lit > 0 ? lit : -lit) + (lit < 0); }
  int value(int lit) const {
    int v = value_[lit > 0 ? lit : -lit];
    return lit > 0 ? v : -v;
  }
  void enqueue(int lit) {
    value_[lit > 0 ? lit : -lit] = static_cast<std::int8_t>(lit > 0 ? 1 : -1);
    trail_.push_back(lit);
  }
  void undo(std::size_t size) {
    while (trail_.size() > size) {
      int lit = trail_.back();
      trail_.pop_back();
      value_[lit > 0 ? lit : -lit] = 0;
    }
    head_ = std::min(head_, size);
    next_ = 0;
  }

  bool propagate() {
    while (head_ < trail_.size()) {
      int falsified = -trail_[head_++];
      auto& ws = watches_[code(falsified)];
      for (std::size_t w = 0; w < ws.size();) {
        auto& c = clauses_[ws[w]];
        if (c[0] == falsified) std::swap(c[0], c[1]);
        if (value(c[0]) > 0) {
          ++w;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k) {
          if (value(c[k]) >= 0) {
            std::swap(c[1], c[k]);
            watches_[code(c[1])].push_back(ws[w]);
            ws[w] = ws.back();
            ws.pop_back();
            moved = true;
            break;
          }
        }
        if (moved) continue;
        if (value(c[0]) < 0) return false;
        enqueue(c[0]);
        ++w;
      }
    }
    return true;
  }

  std::vector<std::vector<int>> clauses_;
  std::vector<std::vector<std::size_t>> watches_;
  std::vector<std::int8_t> value_;
  std::vector<int> order_;
  std::vector<int> trail_;
  std::size_t head_ = 0;
  std::size_t next_ = 0;
};

inline bool prop_satisfiable(std::span<const PropTerm> conjuncts) {
  Cnf cnf;
  for (const auto& t : conjuncts) {
    if (t.is_true()) continue;
    if (t.is_false()) return false;
    cnf.assert_literal(cnf.literal_for(t));
  }
  if (cnf.input_count() > kPropQueryVariableLimit)
    throw CapacityError("propositional query has " + std::to_string(cnf.input_count()) +
                        " variables; limit is " + std::to_string(kPropQueryVariableLimit));
  std::vector<int> order;
  for (const auto& [name, v] : cnf.inputs()) order.push_back(v);
  return Dpll(cnf.variable_count(), std::move(cnf.clauses()), std::move(order)).satisfiable();
}

}  // namespace detail

/// True iff every assignment satisfying all of `context` satisfies `t`.
/// Throws CapacityError above kPropQueryVariableLimit variables.
inline bool implies_prop(std::span<const PropTerm> context, const PropTerm& t) {
  if (t.is_true()) return true;
  std::vector<PropTerm> query(context.begin(), context.end());
  query.push_back(PropTerm::negate(t));
  return !detail::prop_satisfiable(query);
}

inline bool implies_prop(std::initializer_list<PropTerm> context, const PropTerm& t) {
  return implies_prop(std::span<const PropTerm>(context.begin(), context.size()), t);
}

}  // namespace contract_diag
