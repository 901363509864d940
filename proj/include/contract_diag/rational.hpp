#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <optional>
#include <string>
#include <string_view>

namespace contract_diag {

/// Exact rational scalar used by every linear computation.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

/// Parses an integer, a decimal with optional exponent (converted exactly) or `p/q`. Returns nullopt on
/// anything else, including trailing garbage.
inline std::optional<Rational> parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text.empty()) return std::nullopt;

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = parse_rational(text.substr(0, slash));
    auto den = parse_rational(text.substr(slash + 1));
    if (!num || !den || *den == 0) return std::nullopt;
    if (denominator(*num) != 1 || denominator(*den) != 1) return std::nullopt;
    return *num / *den;
  }

  bool negative = false;
  std::size_t pos = 0;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = text[pos] == '-';
    ++pos;
  }
  Integer digits = 0;
  Integer scale = 1;
  bool seen_digit = false;
  bool seen_point = false;
  long exponent = 0;
  for (; pos < text.size(); ++pos) {
    char c = text[pos];
    if ((c == 'e' || c == 'E') && seen_digit) {
      auto rest = text.substr(pos + 1);
      if (!rest.empty() && rest.front() == '+') rest.remove_prefix(1);
      if (rest.empty() || rest.size() > 4) return std::nullopt;
      std::size_t i = rest.front() == '-' ? 1 : 0;
      if (i == rest.size()) return std::nullopt;
      for (std::size_t k = i; k < rest.size(); ++k)
        if (!std::isdigit(static_cast<unsigned char>(rest[k]))) return std::nullopt;
      exponent = std::stol(std::string(rest));
      break;
    }
    if (c == '.') {
      if (seen_point) return std::nullopt;
      seen_point = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    seen_digit = true;
    digits = digits * 10 + (c - '0');
    if (seen_point) scale *= 10;
  }
  if (!seen_digit) return std::nullopt;
  Rational value(digits, scale);
  for (; exponent > 0; --exponent) value *= 10;
  for (; exponent < 0; ++exponent) value /= 10;
  return negative ? Rational(-value) : value;
}

}  // namespace contract_diag
