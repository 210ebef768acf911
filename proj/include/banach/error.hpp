#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace banach {

enum class ErrorKind {
  EmptySpectrum,
  InvalidArgument,
  OwnerMismatch,
  FieldMismatch,
  NotInvertible,
  NotInvertibleTuple,
  LogObstruction,
  NonPositiveValue,
  NotSubset,
  ResolutionError,
  EmptySource,
  DimensionMismatch,
  NotUnipotent,
  NotNearIdentity,
  NotSpecialOrthogonal,
  SingularS,
  HoleConditionViolated,
  ScopeError,
  InvalidWitness,
  PathLeavesI_n,
  SyntaxError,
  DomainError,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

// Every failure in the library surfaces as an Error carrying a kind and a
// machine-readable detail object (the CLI prints the detail on stderr).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, nlohmann::ordered_json detail = {})
      : std::runtime_error(message), kind_(kind), detail_(std::move(detail)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const nlohmann::ordered_json& detail() const noexcept { return detail_; }

  nlohmann::ordered_json to_json() const;

 private:
  ErrorKind kind_;
  nlohmann::ordered_json detail_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message, nlohmann::ordered_json detail = {});

}  // namespace banach
