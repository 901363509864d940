#pragma once

#include "contract_diag/error.hpp"
#include "contract_diag/term_id.hpp"

#include <cctype>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace contract_diag {

/// Immutable propositional formula. AND/OR are n-ary with at least two
/// children and never directly nest themselves; double negation never occurs.
class PropTerm {
 public:
  enum class Kind { constant, var, negation, conjunction, disjunction, implication, equivalence };

  PropTerm() : PropTerm(constant(true)) {}

  static PropTerm constant(bool value) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::constant;
    n->value = value;
    return PropTerm(std::move(n));
  }
  static PropTerm var(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::var;
    n->name = std::move(name);
    return PropTerm(std::move(n));
  }
  static PropTerm negate(const PropTerm& t) {
    if (t.kind() == Kind::negation) return t.child(0);
    return make(Kind::negation, {t});
  }
  static PropTerm conj(std::vector<PropTerm> parts) { return nary(Kind::conjunction, std::move(parts)); }
  static PropTerm disj(std::vector<PropTerm> parts) { return nary(Kind::disjunction, std::move(parts)); }
  static PropTerm implies(const PropTerm& a, const PropTerm& b) { return make(Kind::implication, {a, b}); }
  static PropTerm iff(const PropTerm& a, const PropTerm& b) { return make(Kind::equivalence, {a, b}); }

  Kind kind() const { return node_->kind; }
  bool value() const { return node_->value; }
  const std::string& name() const { return node_->name; }
  const std::vector<PropTerm>& children() const { return node_->children; }
  const PropTerm& child(std::size_t i) const { return node_->children[i]; }

  bool is_true() const { return kind() == Kind::constant && value(); }
  bool is_false() const { return kind() == Kind::constant && !value(); }

  VarSet variables() const {
    VarSet out;
    collect(out);
    return out;
  }

  /// Structural key; equal keys mean identical trees.
  const std::string& key() const;

  bool operator==(const PropTerm& o) const { return node_ == o.node_ || key() == o.key(); }
  bool operator<(const PropTerm& o) const { return key() < o.key(); }

 private:
  struct Node {
    Kind kind = Kind::constant;
    bool value = true;
    std::string name;
    std::vector<PropTerm> children;
    mutable std::string key;
  };

  explicit PropTerm(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static PropTerm make(Kind k, std::vector<PropTerm> children) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->children = std::move(children);
    return PropTerm(std::move(n));
  }

  static PropTerm nary(Kind k, std::vector<PropTerm> parts) {
    std::vector<PropTerm> flat;
    for (auto& p : parts) {
      if (p.kind() == k)
        flat.insert(flat.end(), p.children().begin(), p.children().end());
      else
        flat.push_back(std::move(p));
    }
    if (flat.empty()) return constant(k == Kind::conjunction);
    if (flat.size() == 1) return flat.front();
    return make(k, std::move(flat));
  }

  void collect(VarSet& out) const {
    if (kind() == Kind::var) out.insert(name());
    for (const auto& c : children()) c.collect(out);
  }

  std::shared_ptr<const Node> node_;
};

namespace detail {

inline int precedence(PropTerm::Kind k) {
  switch (k) {
    case PropTerm::Kind::equivalence:
      return 1;
    case PropTerm::Kind::implication:
      return 2;
    case PropTerm::Kind::disjunction:
      return 3;
    case PropTerm::Kind::conjunction:
      return 4;
    case PropTerm::Kind::negation:
      return 5;
    default:
      return 6;
  }
}

inline void render_prop(const PropTerm& t, std::string& out);

inline void render_child(const PropTerm& c, int min_prec, std::string& out) {
  if (precedence(c.kind()) < min_prec) {
    out += '(';
    render_prop(c, out);
    out += ')';
  } else {
    render_prop(c, out);
  }
}

inline void render_prop(const PropTerm& t, std::string& out) {
  using K = PropTerm::Kind;
  switch (t.kind()) {
    case K::constant:
      out += t.value() ? "true" : "false";
      return;
    case K::var:
      out += t.name();
      return;
    case K::negation:
      out += '!';
      render_child(t.child(0), 5, out);
      return;
    case K::conjunction:
    case K::disjunction: {
      const char* sep = t.kind() == K::conjunction ? " & " : " | ";
      int prec = precedence(t.kind()) + 1;
      for (std::size_t i = 0; i < t.children().size(); ++i) {
        if (i) out += sep;
        render_child(t.child(i), prec, out);
      }
      return;
    }
    case K::implication:
      render_child(t.child(0), 3, out);
      out += " => ";
      render_child(t.child(1), 2, out);
      return;
    case K::equivalence:
      render_child(t.child(0), 1, out);
      out += " <=> ";
      render_child(t.child(1), 2, out);
      return;
  }
}

}  // namespace detail

inline const std::string& PropTerm::key() const {
  if (node_->key.empty()) detail::render_prop(*this, node_->key);
  return node_->key;
}

/// Renders with the minimal parentheses the parser needs.
inline std::string render(const PropTerm& t) { return t.key(); }

namespace detail {

class PropParser {
 public:
  explicit PropParser(std::string_view text) : text_(text) {}

  PropTerm parse() {
    PropTerm t = equivalence();
    skip_ws();
    if (pos_ < text_.size()) fail("unexpected trailing input '" + std::string(text_.substr(pos_)) + "'");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool match(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  PropTerm equivalence() {
    PropTerm lhs = implication();
    while (match("<=>")) lhs = PropTerm::iff(lhs, implication());
    return lhs;
  }
  PropTerm implication() {
    PropTerm lhs = disjunction();
    if (match("=>")) return PropTerm::implies(lhs, implication());
    return lhs;
  }
  PropTerm disjunction() {
    std::vector<PropTerm> parts{conjunction()};
    while (match("||") || match("|")) parts.push_back(conjunction());
    return PropTerm::disj(std::move(parts));
  }
  PropTerm conjunction() {
    std::vector<PropTerm> parts{unary()};
    while (match("&&") || match("&")) parts.push_back(unary());
    return PropTerm::conj(std::move(parts));
  }
  PropTerm unary() {
    if (match("!") || match("~")) return PropTerm::negate(unary());
    return atom();
  }
  PropTerm atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (match("(")) {
      PropTerm inner = equivalence();
      if (!match(")")) fail("expected ')'");
      return inner;
    }
    char c = text_[pos_];
    if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) fail(std::string("unexpected character '") + c + "'");
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '\'' || d == '@')
        ++pos_;
      else
        break;
    }
    std::string word(text_.substr(start, pos_ - start));
    if (word == "true") return PropTerm::constant(true);
    if (word == "false") return PropTerm::constant(false);
    return PropTerm::var(std::move(word));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Grammar: `!`, `&`, `|`, `=>` (right-associative), `<=>`, parentheses,
/// identifiers and `true`/`false`; precedence in that order, tightest first.
inline PropTerm parse_prop(std::string_view text) { return detail::PropParser(text).parse(); }

inline bool evaluate(const PropTerm& t, const Valuation<bool>& v) {
  using K = PropTerm::Kind;
  switch (t.kind()) {
    case K::constant:
      return t.value();
    case K::var: {
      auto it = v.find(t.name());
      if (it == v.end()) throw MissingVariableError(t.name());
      return it->second;
    }
    case K::negation:
      return !evaluate(t.child(0), v);
    case K::conjunction:
      for (const auto& c : t.children())
        if (!evaluate(c, v)) return false;
      return true;
    case K::disjunction:
      for (const auto& c : t.children())
        if (evaluate(c, v)) return true;
      return false;
    case K::implication:
      return !evaluate(t.child(0), v) || evaluate(t.child(1), v);
    case K::equivalence:
      return evaluate(t.child(0), v) == evaluate(t.child(1), v);
  }
  return false;
}

/// Constant folding, flattening, duplicate removal, complementary pairs and
/// absorption. Not a minimizer.
inline PropTerm simplify(const PropTerm& t) {
  using K = PropTerm::Kind;
  switch (t.kind()) {
    case K::constant:
    case K::var:
      return t;
    case K::negation: {
      PropTerm c = simplify(t.child(0));
      if (c.kind() == K::constant) return PropTerm::constant(!c.value());
      return PropTerm::negate(c);
    }
    case K::conjunction:
    case K::disjunction: {
      const bool is_and = t.kind() == K::conjunction;
      const K dual = is_and ? K::disjunction : K::conjunction;
      std::vector<PropTerm> kids;
      for (const auto& c : t.children()) {
        PropTerm s = simplify(c);
        if (s.kind() == t.kind()) {
          kids.insert(kids.end(), s.children().begin(), s.children().end());
        } else {
          kids.push_back(std::move(s));
        }
      }
      std::vector<PropTerm> out;
      std::set<std::string> seen;
      for (auto& k : kids) {
        if (k.kind() == K::constant) {
          if (k.value() == is_and) continue;   // neutral element
          return PropTerm::constant(!is_and);  // absorbing element
        }
        if (seen.insert(k.key()).second) out.push_back(std::move(k));
      }
      for (const auto& k : out) {
        std::string complement = PropTerm::negate(k).key();
        if (seen.count(complement)) return PropTerm::constant(!is_and);
      }
      // Absorption: a & (a | b) = a, a | (a & b) = a.
      std::vector<PropTerm> kept;
      for (const auto& k : out) {
        bool absorbed = false;
        if (k.kind() == dual)
          for (const auto& g : k.children())
            if (seen.count(g.key())) absorbed = true;
        if (!absorbed) kept.push_back(k);
      }
      return is_and ? PropTerm::conj(std::move(kept)) : PropTerm::disj(std::move(kept));
    }
    case K::implication: {
      PropTerm a = simplify(t.child(0));
      PropTerm b = simplify(t.child(1));
      if (a.is_false() || b.is_true()) return PropTerm::constant(true);
      if (a.is_true()) return b;
      if (b.is_false()) return simplify(PropTerm::negate(a));
      if (a == b) return PropTerm::constant(true);
      return PropTerm::implies(a, b);
    }
    case K::equivalence: {
      PropTerm a = simplify(t.child(0));
      PropTerm b = simplify(t.child(1));
      if (a.kind() == K::constant) return a.value() ? b : simplify(PropTerm::negate(b));
      if (b.kind() == K::constant) return b.value() ? a : simplify(PropTerm::negate(a));
      if (a == b) return PropTerm::constant(true);
      if (PropTerm::negate(a) == b) return PropTerm::constant(false);
      return PropTerm::iff(a, b);
    }
  }
  return t;
}

/// Replaces every occurrence of `var` by `replacement` (no simplification).
inline PropTerm substitute(const PropTerm& t, const std::string& var, const PropTerm& replacement) {
  using K = PropTerm::Kind;
  switch (t.kind()) {
    case K::constant:
      return t;
    case K::var:
      return t.name() == var ? replacement : t;
    case K::negation:
      return PropTerm::negate(substitute(t.child(0), var, replacement));
    case K::conjunction:
    case K::disjunction: {
      std::vector<PropTerm> kids;
      for (const auto& c : t.children()) kids.push_back(substitute(c, var, replacement));
      return t.kind() == K::conjunction ? PropTerm::conj(std::move(kids)) : PropTerm::disj(std::move(kids));
    }
    case K::implication:
      return PropTerm::implies(substitute(t.child(0), var, replacement), substitute(t.child(1), var, replacement));
    case K::equivalence:
      return PropTerm::iff(substitute(t.child(0), var, replacement), substitute(t.child(1), var, replacement));
  }
  return t;
}

namespace detail {

/// Shannon expansion with miniscoping: conjuncts (for exists) or disjuncts
/// (for forall) that do not mention `var` are kept outside.
inline PropTerm quantify(const std::string& var, const PropTerm& t, bool existential) {
  using K = PropTerm::Kind;
  if (!t.variables().count(var)) return t;
  const K outer = existential ? K::conjunction : K::disjunction;
  const K spread = existential ? K::disjunction : K::conjunction;
  auto join = [&](K k, std::vector<PropTerm> parts) {
    return k == K::conjunction ? PropTerm::conj(std::move(parts)) : PropTerm::disj(std::move(parts));
  };
  if (t.kind() == spread) {
    std::vector<PropTerm> parts;
    for (const auto& c : t.children()) parts.push_back(quantify(var, c, existential));
    return simplify(join(spread, std::move(parts)));
  }
  if (t.kind() == outer) {
    std::vector<PropTerm> free, bound;
    for (const auto& c : t.children()) (c.variables().count(var) ? bound : free).push_back(c);
    if (!free.empty()) {
      free.push_back(quantify(var, join(outer, std::move(bound)), existential));
      return simplify(join(outer, std::move(free)));
    }
  }
  return simplify(join(spread, {substitute(t, var, PropTerm::constant(false)),
                                substitute(t, var, PropTerm::constant(true))}));
}

}  // namespace detail

inline PropTerm exists(const std::string& var, const PropTerm& t) { return detail::quantify(var, t, true); }

inline PropTerm forall(const std::string& var, const PropTerm& t) { return detail::quantify(var, t, false); }

/// Bit 1: `var` occurs positively; bit 2: negatively.
inline int polarity(const PropTerm& t, const std::string& var, bool positive = true) {
  using K = PropTerm::Kind;
  switch (t.kind()) {
    case K::constant:
      return 0;
    case K::var:
      return t.name() == var ? (positive ? 1 : 2) : 0;
    case K::negation:
      return polarity(t.child(0), var, !positive);
    case K::conjunction:
    case K::disjunction: {
      int p = 0;
      for (const auto& c : t.children()) p |= polarity(c, var, positive);
      return p;
    }
    case K::implication:
      return polarity(t.child(0), var, !positive) | polarity(t.child(1), var, positive);
    case K::equivalence: {
      int p = polarity(t.child(0), var, true) | polarity(t.child(1), var, true);
      return p ? 3 : 0;
    }
  }
  return 0;
}

}  // namespace contract_diag
