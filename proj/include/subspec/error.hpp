#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace subspec {

enum class ErrorKind {
  InvalidStructure,
  JacobiViolation,
  NotNilpotent,
  NotBracketGenerating,
  BasisNotAdapted,
  ParseError,
  NotPolynomial,
  NotDifferentiable,
  DegreeSearchOverflow,
  IdentityFailed,
  EmptyDomain,
  PotentialNotEvaluable,
  WeightNonpositive,
  NotSymmetric,
  NoConvergence,
  LowerBoundViolated,
  InvalidArgument,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidStructure: return "InvalidStructure";
    case ErrorKind::JacobiViolation: return "JacobiViolation";
    case ErrorKind::NotNilpotent: return "NotNilpotent";
    case ErrorKind::NotBracketGenerating: return "NotBracketGenerating";
    case ErrorKind::BasisNotAdapted: return "BasisNotAdapted";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NotPolynomial: return "NotPolynomial";
    case ErrorKind::NotDifferentiable: return "NotDifferentiable";
    case ErrorKind::DegreeSearchOverflow: return "DegreeSearchOverflow";
    case ErrorKind::IdentityFailed: return "IdentityFailed";
    case ErrorKind::EmptyDomain: return "EmptyDomain";
    case ErrorKind::PotentialNotEvaluable: return "PotentialNotEvaluable";
    case ErrorKind::WeightNonpositive: return "WeightNonpositive";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::LowerBoundViolated: return "LowerBoundViolated";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace subspec
