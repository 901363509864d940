#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace contract_diag {

enum class Section { assumption, guarantee };

inline const char* to_string(Section s) { return s == Section::assumption ? "assumption" : "guarantee"; }

/// Identity of one assumption or guarantee term. Owners are component names or
/// composition-stage labels such as `comp_3`.
struct TermId {
  std::string owner;
  Section section = Section::assumption;
  std::size_t index = 0;

  auto operator<=>(const TermId&) const = default;
  bool operator==(const TermId&) const = default;

  /// `M1.a0`, `comp_2.g1`.
  std::string str() const {
    return owner + (section == Section::assumption ? ".a" : ".g") + std::to_string(index);
  }
};

using VarSet = std::set<std::string>;

/// A term together with its identity; used for contract sections and for
/// elimination contexts.
template <typename Term>
struct Entry {
  TermId id;
  Term term;
};

template <typename Term>
struct EliminationResult {
  Term term;
  std::vector<TermId> used;
};

template <typename V>
using Valuation = std::map<std::string, V>;

}  // namespace contract_diag
