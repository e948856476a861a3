#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hopfnf {

enum class ErrorKind {
  InvalidInput,
  DimensionMismatch,
  DegreeOutOfRange,
  DegreeMismatch,
  NonConvergence,
  NotContracting,
  NotTriangular,
  UnorderedSpectrum,
  SingularLinearPart,
  SingularMatrix,
  SpectrumMismatch,
  CertificationFailure,
  IllConditionedResonance,
  NoConvergence,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegreeOutOfRange: return "DegreeOutOfRange";
    case ErrorKind::DegreeMismatch: return "DegreeMismatch";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::NotContracting: return "NotContracting";
    case ErrorKind::NotTriangular: return "NotTriangular";
    case ErrorKind::UnorderedSpectrum: return "UnorderedSpectrum";
    case ErrorKind::SingularLinearPart: return "SingularLinearPart";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::SpectrumMismatch: return "SpectrumMismatch";
    case ErrorKind::CertificationFailure: return "CertificationFailure";
    case ErrorKind::IllConditionedResonance: return "IllConditionedResonance";
    case ErrorKind::NoConvergence: return "NoConvergence";
  }
  return "Unknown";
}

/// Numerical conditions (as opposed to bad input) that the CLI reports with
/// exit code 3.
constexpr bool is_numerical_condition(ErrorKind kind) noexcept {
  return kind == ErrorKind::IllConditionedResonance || kind == ErrorKind::NoConvergence ||
         kind == ErrorKind::NonConvergence;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hopfnf
