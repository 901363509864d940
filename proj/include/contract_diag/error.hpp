#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace contract_diag {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class MissingVariableError : public Error {
 public:
  explicit MissingVariableError(const std::string& var)
      : Error("missing value for variable '" + var + "'"), variable_(var) {}
  const std::string& variable() const noexcept { return variable_; }

 private:
  std::string variable_;
};

/// No sequence of context terms removes the requested variables.
class EliminationError : public Error {
 public:
  using Error::Error;
};

/// A propositional query exceeds the documented variable bound.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Violations of IO-contract well-formedness (scopes, alphabets, theories).
class ContractError : public Error {
 public:
  using Error::Error;
};

class CompositionError : public Error {
 public:
  using Error::Error;
};

/// Diagnosis preconditions do not hold (no violation, assumptions broken).
class DiagnosisError : public Error {
 public:
  using Error::Error;
};

/// Spec or log files that cannot be read or do not validate.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace contract_diag
