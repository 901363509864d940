#pragma once

#include "contract_diag/linear_elimination.hpp"
#include "contract_diag/linear_implication.hpp"
#include "contract_diag/linear_term.hpp"
#include "contract_diag/prop_elimination.hpp"
#include "contract_diag/prop_implication.hpp"
#include "contract_diag/prop_term.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace contract_diag {

/// Linear inequalities over rationals.
struct LinearTheory {
  using term_type = LinearTerm;
  using value_type = Rational;
  static constexpr std::string_view name = "linear";

  static std::vector<LinearTerm> parse(std::string_view text) { return parse_linear_multi(text); }
  static std::string render(const LinearTerm& t) { return contract_diag::render(t); }
  static VarSet variables(const LinearTerm& t) { return t.variables(); }
  static bool evaluate(const LinearTerm& t, const Valuation<Rational>& v) { return contract_diag::evaluate(t, v); }
  static bool implies(std::span<const LinearTerm> context, const LinearTerm& t) { return implies_linear(context, t); }
  static EliminationResult<LinearTerm> eliminate(const LinearTerm& t, const VarSet& elim,
                                                 std::span<const Entry<LinearTerm>> context, Direction dir) {
    return eliminate_linear(t, elim, context, dir);
  }
  static bool is_true(const LinearTerm& t) { return t.is_true(); }
  static bool is_false(const LinearTerm& t) { return t.is_false(); }

  static std::optional<Rational> parse_value(std::string_view text) { return parse_rational(text); }
  static std::string value_to_string(const Rational& v) { return to_string(v); }
};

/// Propositional formulas over Boolean variables.
struct PropTheory {
  using term_type = PropTerm;
  using value_type = bool;
  static constexpr std::string_view name = "prop";

  static std::vector<PropTerm> parse(std::string_view text) { return {parse_prop(text)}; }
  static std::string render(const PropTerm& t) { return contract_diag::render(t); }
  static VarSet variables(const PropTerm& t) { return t.variables(); }
  static bool evaluate(const PropTerm& t, const Valuation<bool>& v) { return contract_diag::evaluate(t, v); }
  static bool implies(std::span<const PropTerm> context, const PropTerm& t) { return implies_prop(context, t); }
  static EliminationResult<PropTerm> eliminate(const PropTerm& t, const VarSet& elim,
                                               std::span<const Entry<PropTerm>> context, Direction dir) {
    return eliminate_prop(t, elim, context, dir);
  }
  static bool is_true(const PropTerm& t) { return t.is_true(); }
  static bool is_false(const PropTerm& t) { return t.is_false(); }

  static std::optional<bool> parse_value(std::string_view text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    return std::nullopt;
  }
  static std::string value_to_string(bool v) { return v ? "true" : "false"; }
};

}  // namespace contract_diag
