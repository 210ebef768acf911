#include "banach/error.hpp"

namespace banach {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptySpectrum: return "EmptySpectrum";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::OwnerMismatch: return "OwnerMismatch";
    case ErrorKind::FieldMismatch: return "FieldMismatch";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::NotInvertibleTuple: return "NotInvertibleTuple";
    case ErrorKind::LogObstruction: return "LogObstruction";
    case ErrorKind::NonPositiveValue: return "NonPositiveValue";
    case ErrorKind::NotSubset: return "NotSubset";
    case ErrorKind::ResolutionError: return "ResolutionError";
    case ErrorKind::EmptySource: return "EmptySource";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotUnipotent: return "NotUnipotent";
    case ErrorKind::NotNearIdentity: return "NotNearIdentity";
    case ErrorKind::NotSpecialOrthogonal: return "NotSpecialOrthogonal";
    case ErrorKind::SingularS: return "SingularS";
    case ErrorKind::HoleConditionViolated: return "HoleConditionViolated";
    case ErrorKind::ScopeError: return "ScopeError";
    case ErrorKind::InvalidWitness: return "InvalidWitness";
    case ErrorKind::PathLeavesI_n: return "PathLeavesI_n";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

nlohmann::ordered_json Error::to_json() const {
  nlohmann::ordered_json j;
  j["error"] = std::string(to_string(kind_));
  j["message"] = what();
  if (!detail_.is_null()) j["detail"] = detail_;
  return j;
}

void fail(ErrorKind kind, const std::string& message, nlohmann::ordered_json detail) {
  throw Error(kind, message, std::move(detail));
}

}  // namespace banach
