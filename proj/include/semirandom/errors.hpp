#ifndef SEMIRANDOM_ERRORS_HPP
#define SEMIRANDOM_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace semirandom {

enum class ErrorKind {
  InvalidDimension,
  InvalidParameter,
  InvalidInput,
  DegenerateBasis,
  AmbiguousGradient,
  FormatError,
  IoError,
  Unreachable,
  NotConverged,
  StationaryGradient,
  NoCrossing,
  CurvatureConditionViolated,
  NotSufficientlyDistant,
  Unavailable,
  NoIntersection,
  InvalidConfig,
  InsufficientPoints,
  EmptyTrace,
  Vacuous,
  NoData,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "InvalidDimension";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::DegenerateBasis: return "DegenerateBasis";
    case ErrorKind::AmbiguousGradient: return "AmbiguousGradient";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::Unreachable: return "Unreachable";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::StationaryGradient: return "StationaryGradient";
    case ErrorKind::NoCrossing: return "NoCrossing";
    case ErrorKind::CurvatureConditionViolated: return "CurvatureConditionViolated";
    case ErrorKind::NotSufficientlyDistant: return "NotSufficientlyDistant";
    case ErrorKind::Unavailable: return "Unavailable";
    case ErrorKind::NoIntersection: return "NoIntersection";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::InsufficientPoints: return "InsufficientPoints";
    case ErrorKind::EmptyTrace: return "EmptyTrace";
    case ErrorKind::Vacuous: return "Vacuous";
    case ErrorKind::NoData: return "NoData";
  }
  return "Unknown";
}

/// Usage and validation problems (exit code 1 in the CLI).
inline bool is_usage_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDimension:
    case ErrorKind::InvalidParameter:
    case ErrorKind::InvalidInput:
    case ErrorKind::DegenerateBasis:
    case ErrorKind::FormatError:
    case ErrorKind::IoError:
    case ErrorKind::InvalidConfig:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace semirandom

#endif  // SEMIRANDOM_ERRORS_HPP
