#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace topab {

enum class ErrorKind {
  NonPositiveModulus,
  ElementNotInGroup,
  IllDefined,
  NotASubgroup,
  CompositionMismatch,
  NotContinuous,
  NotWellDefined,
  InvalidSection,
  InvalidCocycle,
  NotTopologizing,
  ValueOutsideIota2Image,
  NotAnExtension,
  HypothesisViolation,
  BudgetExceeded,
  UnknownTheorem,
  UnknownHypothesis,
  MalformedInput,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPositiveModulus: return "NonPositiveModulus";
    case ErrorKind::ElementNotInGroup: return "ElementNotInGroup";
    case ErrorKind::IllDefined: return "IllDefined";
    case ErrorKind::NotASubgroup: return "NotASubgroup";
    case ErrorKind::CompositionMismatch: return "CompositionMismatch";
    case ErrorKind::NotContinuous: return "NotContinuous";
    case ErrorKind::NotWellDefined: return "NotWellDefined";
    case ErrorKind::InvalidSection: return "InvalidSection";
    case ErrorKind::InvalidCocycle: return "InvalidCocycle";
    case ErrorKind::NotTopologizing: return "NotTopologizing";
    case ErrorKind::ValueOutsideIota2Image: return "ValueOutsideIota2Image";
    case ErrorKind::NotAnExtension: return "NotAnExtension";
    case ErrorKind::HypothesisViolation: return "HypothesisViolation";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::UnknownTheorem: return "UnknownTheorem";
    case ErrorKind::UnknownHypothesis: return "UnknownHypothesis";
    case ErrorKind::MalformedInput: return "MalformedInput";
  }
  return "Unknown";
}

/// All domain failures surface as this exception; `kind()` is the stable tag.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace topab
