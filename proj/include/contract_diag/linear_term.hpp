#pragma once

#include "contract_diag/error.hpp"
#include "contract_diag/rational.hpp"
#include "contract_diag/term_id.hpp"

#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace contract_diag {

/// One non-strict linear constraint `sum(c_v * v) <= bound` in canonical form:
/// integer coefficients and bound with gcd 1, zero coefficients removed. A term
/// with no variables is the TRUE marker (bound >= 0) or FALSE marker.
class LinearTerm {
 public:
  LinearTerm() = default;
  LinearTerm(std::map<std::string, Rational> coefficients, Rational bound)
      : coefficients_(std::move(coefficients)), bound_(std::move(bound)) {
    canonicalize();
  }

  static LinearTerm true_marker() { return LinearTerm({}, 0); }
  static LinearTerm false_marker() { return LinearTerm({}, -1); }

  const std::map<std::string, Rational>& coefficients() const { return coefficients_; }
  const Rational& bound() const { return bound_; }

  Rational coefficient(const std::string& var) const {
    auto it = coefficients_.find(var);
    return it == coefficients_.end() ? Rational(0) : it->second;
  }

  bool is_constant() const { return coefficients_.empty(); }
  bool is_true() const { return is_constant() && bound_ >= 0; }
  bool is_false() const { return is_constant() && bound_ < 0; }

  VarSet variables() const {
    VarSet out;
    for (const auto& [v, c] : coefficients_) out.insert(v);
    return out;
  }

  bool operator==(const LinearTerm& o) const {
    return coefficients_ == o.coefficients_ && bound_ == o.bound_;
  }
  bool operator<(const LinearTerm& o) const {
    if (coefficients_ != o.coefficients_) return coefficients_ < o.coefficients_;
    return bound_ < o.bound_;
  }

  /// `lambda * this + mu * other` for non-negative multipliers; the result is
  /// implied by the conjunction of both operands.
  LinearTerm combine(const Rational& lambda, const LinearTerm& other, const Rational& mu) const {
    std::map<std::string, Rational> coeffs;
    for (const auto& [v, c] : coefficients_) coeffs[v] += lambda * c;
    for (const auto& [v, c] : other.coefficients_) coeffs[v] += mu * c;
    return LinearTerm(std::move(coeffs), lambda * bound_ + mu * other.bound_);
  }

 private:
  void canonicalize() {
    for (auto it = coefficients_.begin(); it != coefficients_.end();) {
      if (it->second == 0)
        it = coefficients_.erase(it);
      else
        ++it;
    }
    if (coefficients_.empty()) {
      bound_ = bound_ >= 0 ? Rational(0) : Rational(-1);
      return;
    }
    // Scale by a positive factor only; a negative factor would flip the relation.
    Integer lcm_den = 1;
    auto lcm = [](const Integer& a, const Integer& b) { return a / boost::multiprecision::gcd(a, b) * b; };
    for (const auto& [v, c] : coefficients_) lcm_den = lcm(lcm_den, denominator(c));
    lcm_den = lcm(lcm_den, denominator(bound_));
    Integer g = 0;
    for (const auto& [v, c] : coefficients_) g = boost::multiprecision::gcd(g, Integer(abs(numerator(Rational(c * lcm_den)))));
    g = boost::multiprecision::gcd(g, Integer(abs(numerator(Rational(bound_ * lcm_den)))));
    Rational factor = Rational(lcm_den) / Rational(g);
    for (auto& [v, c] : coefficients_) c *= factor;
    bound_ *= factor;
  }

  std::map<std::string, Rational> coefficients_;
  Rational bound_ = 0;
};

namespace detail {

inline bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '@';
}

/// Affine form `sum(c_v * v) + constant` built while parsing.
struct Affine {
  std::map<std::string, Rational> coeffs;
  Rational constant = 0;

  bool is_constant() const {
    for (const auto& [v, c] : coeffs)
      if (c != 0) return false;
    return true;
  }
  Affine& scale(const Rational& k) {
    for (auto& [v, c] : coeffs) c *= k;
    constant *= k;
    return *this;
  }
  Affine& add(const Affine& o, const Rational& k) {
    for (const auto& [v, c] : o.coeffs) coeffs[v] += k * c;
    constant += k * o.constant;
    return *this;
  }
};

enum class Relation { le, ge, eq };

class LinearParser {
 public:
  explicit LinearParser(std::string_view text) : text_(text) {}

  std::vector<LinearTerm> parse() {
    skip_ws();
    if (match_word("true")) {
      expect_end();
      return {LinearTerm::true_marker()};
    }
    if (match_word("false")) {
      expect_end();
      return {LinearTerm::false_marker()};
    }
    Affine lhs = expression();
    Relation rel = relation();
    Affine rhs = expression();
    expect_end();
    // lhs - rhs <= 0
    Affine diff = lhs;
    diff.add(rhs, -1);
    LinearTerm le(diff.coeffs, -diff.constant);
    Affine neg = diff;
    neg.scale(-1);
    LinearTerm ge(neg.coeffs, -neg.constant);
    switch (rel) {
      case Relation::le:
        return {le};
      case Relation::ge:
        return {ge};
      case Relation::eq:
        return {le, ge};
    }
    return {};
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }
  void expect_end() {
    if (!at_end()) fail("unexpected trailing input '" + std::string(text_.substr(pos_)) + "'");
  }
  bool match(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  bool match_word(std::string_view word) {
    skip_ws();
    if (text_.substr(pos_, word.size()) != word) return false;
    std::size_t end = pos_ + word.size();
    if (end < text_.size() && is_ident_char(text_[end])) return false;
    pos_ = end;
    return true;
  }

  Relation relation() {
    if (match("<=") || match("\xE2\x89\xA4")) return Relation::le;
    if (match(">=") || match("\xE2\x89\xA5")) return Relation::ge;
    if (match("==") || match("=")) return Relation::eq;
    if (match("<") || match(">")) fail("strict inequalities are not supported");
    fail("expected one of <=, >=, =");
  }

  Affine expression() {
    Affine acc;
    bool first = true;
    for (;;) {
      Rational sign = 1;
      if (match("+")) {
        sign = 1;
      } else if (match("-")) {
        sign = -1;
      } else if (!first) {
        break;
      }
      first = false;
      acc.add(product(), sign);
    }
    return acc;
  }

  Affine product() {
    Affine acc = factor();
    for (;;) {
      skip_ws();
      if (match("*")) {
        Affine rhs = factor();
        acc = multiply(acc, rhs);
      } else if (match("/")) {
        std::size_t at = pos_;
        Affine rhs = factor();
        if (!rhs.is_constant()) {
          pos_ = at;
          fail("division by a non-constant expression");
        }
        if (rhs.constant == 0) {
          pos_ = at;
          fail("division by zero");
        }
        acc.scale(1 / rhs.constant);
      } else if (pos_ < text_.size() && (is_ident_start(text_[pos_]) || text_[pos_] == '(') && acc.is_constant()) {
        // Juxtaposition such as `2o'` or `3(x + y)`.
        Affine rhs = factor();
        acc = multiply(acc, rhs);
      } else {
        break;
      }
    }
    return acc;
  }

  Affine multiply(const Affine& a, const Affine& b) {
    if (a.is_constant()) {
      Affine r = b;
      return r.scale(a.constant);
    }
    if (b.is_constant()) {
      Affine r = a;
      return r.scale(b.constant);
    }
    fail("nonlinear product of two variables");
  }

  Affine factor() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      Affine f = factor();
      return f.scale(-1);
    }
    if (c == '+') {
      ++pos_;
      return factor();
    }
    if (c == '(') {
      ++pos_;
      Affine inner = expression();
      if (!match(")")) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
      auto value = parse_rational(text_.substr(start, pos_ - start));
      if (!value) {
        pos_ = start;
        fail("malformed number");
      }
      Affine a;
      a.constant = *value;
      return a;
    }
    if (is_ident_start(c)) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
      Affine a;
      a.coeffs[std::string(text_.substr(start, pos_ - start))] = 1;
      return a;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses a constraint that may be an equality; equalities yield two terms.
inline std::vector<LinearTerm> parse_linear_multi(std::string_view text) {
  return detail::LinearParser(text).parse();
}

inline LinearTerm parse_linear(std::string_view text) {
  auto terms = parse_linear_multi(text);
  if (terms.size() != 1)
    throw ParseError("equality yields two terms; use parse_linear_multi", 0);
  return terms.front();
}

/// Renders `lhs <= bound` with variables in lexicographic order, e.g.
/// `i - 2*o' <= -3`. Markers render as `true` / `false`.
inline std::string render(const LinearTerm& t) {
  if (t.is_true()) return "true";
  if (t.is_false()) return "false";
  std::string out;
  bool first = true;
  for (const auto& [v, c] : t.coefficients()) {
    Rational mag = abs(c);
    if (first) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    first = false;
    if (mag != 1) out += to_string(mag) + "*";
    out += v;
  }
  out += " <= " + to_string(t.bound());
  return out;
}

inline bool evaluate(const LinearTerm& t, const Valuation<Rational>& v) {
  Rational lhs = 0;
  for (const auto& [var, c] : t.coefficients()) {
    auto it = v.find(var);
    if (it == v.end()) throw MissingVariableError(var);
    lhs += c * it->second;
  }
  return lhs <= t.bound();
}

}  // namespace contract_diag
