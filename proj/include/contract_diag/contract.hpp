#pragma once

#include "contract_diag/error.hpp"
#include "contract_diag/term_id.hpp"
#include "contract_diag/theory.hpp"

#include <string>
#include <utility>
#include <vector>

namespace contract_diag {

enum class Status { idle, active, fail };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::idle:
      return "IDLE";
    case Status::active:
      return "ACTIVE";
    case Status::fail:
      return "FAIL";
  }
  return "?";
}

/// IO contract (inputs, outputs, assumptions, guarantees). Assumptions may
/// only mention inputs; guarantees may mention inputs and outputs.
template <typename Theory>
class Contract {
 public:
  using Term = typename Theory::term_type;
  using TermEntry = Entry<Term>;

  Contract() = default;

  Contract(std::string name, VarSet inputs, VarSet outputs, std::vector<Term> assumptions,
           std::vector<Term> guarantees)
      : name_(std::move(name)), inputs_(std::move(inputs)), outputs_(std::move(outputs)) {
    for (auto& t : assumptions) assumptions_.push_back({{name_, Section::assumption, assumptions_.size()}, std::move(t)});
    for (auto& t : guarantees) guarantees_.push_back({{name_, Section::guarantee, guarantees_.size()}, std::move(t)});
    validate();
  }

  /// Takes terms with their identities already assigned (composition results).
  Contract(std::string name, VarSet inputs, VarSet outputs, std::vector<TermEntry> assumptions,
           std::vector<TermEntry> guarantees)
      : name_(std::move(name)),
        inputs_(std::move(inputs)),
        outputs_(std::move(outputs)),
        assumptions_(std::move(assumptions)),
        guarantees_(std::move(guarantees)) {
    validate();
  }

  const std::string& name() const { return name_; }
  const VarSet& inputs() const { return inputs_; }
  const VarSet& outputs() const { return outputs_; }
  const std::vector<TermEntry>& assumptions() const { return assumptions_; }
  const std::vector<TermEntry>& guarantees() const { return guarantees_; }

  std::vector<Term> assumption_terms() const { return terms_of(assumptions_); }
  std::vector<Term> guarantee_terms() const { return terms_of(guarantees_); }

  std::size_t term_count() const { return assumptions_.size() + guarantees_.size(); }

  const TermEntry* find(const TermId& id) const {
    const auto& section = id.section == Section::assumption ? assumptions_ : guarantees_;
    for (const auto& e : section)
      if (e.id == id) return &e;
    return nullptr;
  }

 private:
  static std::vector<Term> terms_of(const std::vector<TermEntry>& entries) {
    std::vector<Term> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.term);
    return out;
  }

  void validate() const {
    for (const auto& v : inputs_)
      if (outputs_.count(v)) throw ContractError("contract '" + name_ + "': variable '" + v + "' is both input and output");
    for (const auto& e : assumptions_)
      for (const auto& v : Theory::variables(e.term))
        if (!inputs_.count(v))
          throw ContractError("contract '" + name_ + "': assumption '" + Theory::render(e.term) +
                              "' mentions non-input variable '" + v + "'");
    for (const auto& e : guarantees_)
      for (const auto& v : Theory::variables(e.term))
        if (!inputs_.count(v) && !outputs_.count(v))
          throw ContractError("contract '" + name_ + "': guarantee '" + Theory::render(e.term) +
                              "' mentions undeclared variable '" + v + "'");
  }

  std::string name_;
  VarSet inputs_;
  VarSet outputs_;
  std::vector<TermEntry> assumptions_;
  std::vector<TermEntry> guarantees_;
};

/// Parses term texts and builds a validated contract.
template <typename Theory>
Contract<Theory> make_contract(const std::string& name, const VarSet& inputs, const VarSet& outputs,
                               const std::vector<std::string>& assumption_texts,
                               const std::vector<std::string>& guarantee_texts) {
  using Term = typename Theory::term_type;
  auto parse_all = [](const std::vector<std::string>& texts) {
    std::vector<Term> out;
    for (const auto& s : texts)
      for (auto& t : Theory::parse(s)) out.push_back(std::move(t));
    return out;
  };
  return Contract<Theory>(name, inputs, outputs, parse_all(assumption_texts), parse_all(guarantee_texts));
}

struct StatusResult {
  Status status = Status::active;
  std::vector<TermId> failing;
};

/// IDLE when an assumption is false (listing those), else FAIL when a
/// guarantee is false (listing those), else ACTIVE.
template <typename Theory>
StatusResult evaluate_status(const Contract<Theory>& c, const Valuation<typename Theory::value_type>& v) {
  StatusResult r;
  for (const auto& e : c.assumptions())
    if (!Theory::evaluate(e.term, v)) r.failing.push_back(e.id);
  if (!r.failing.empty()) {
    r.status = Status::idle;
    return r;
  }
  for (const auto& e : c.guarantees())
    if (!Theory::evaluate(e.term, v)) r.failing.push_back(e.id);
  r.status = r.failing.empty() ? Status::active : Status::fail;
  return r;
}

/// c1 refines c2 when c2's assumptions imply c1's, and c2's assumptions with
/// c1's guarantees imply c2's guarantees.
template <typename Theory>
bool refines(const Contract<Theory>& c1, const Contract<Theory>& c2) {
  if (c1.inputs() != c2.inputs() || c1.outputs() != c2.outputs())
    throw ContractError("refinement check needs identical alphabets ('" + c1.name() + "' vs '" + c2.name() + "')");
  auto a2 = c2.assumption_terms();
  for (const auto& e : c1.assumptions())
    if (!Theory::implies(a2, e.term)) return false;
  auto premises = a2;
  for (const auto& e : c1.guarantees()) premises.push_back(e.term);
  for (const auto& e : c2.guarantees())
    if (!Theory::implies(premises, e.term)) return false;
  return true;
}

}  // namespace contract_diag
