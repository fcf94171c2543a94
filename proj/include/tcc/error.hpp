#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tcc {

enum class ErrorKind {
  MalformedHeader,
  MalformedRecord,
  IndexOutOfRange,
  DuplicateCanonicalEntry,
  SizeLimit,
  DimensionLimit,
  DimensionMismatch,
  InvalidArgument,
  NonPositiveWeight,
  ZeroReferenceOverlap,
  SpaceMismatch,
  GapViolation,
  NotNormalized,
  SameOrbital,
  EmptySelection,
  MissingReference,
  SolverFailure,
  SingularJacobian,
  InsufficientPoints,
  Io,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedHeader: return "MalformedHeader";
    case ErrorKind::MalformedRecord: return "MalformedRecord";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::DuplicateCanonicalEntry: return "DuplicateCanonicalEntry";
    case ErrorKind::SizeLimit: return "SizeLimit";
    case ErrorKind::DimensionLimit: return "DimensionLimit";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorKind::ZeroReferenceOverlap: return "ZeroReferenceOverlap";
    case ErrorKind::SpaceMismatch: return "SpaceMismatch";
    case ErrorKind::GapViolation: return "GapViolation";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::SameOrbital: return "SameOrbital";
    case ErrorKind::EmptySelection: return "EmptySelection";
    case ErrorKind::MissingReference: return "MissingReference";
    case ErrorKind::SolverFailure: return "SolverFailure";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::InsufficientPoints: return "InsufficientPoints";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable kind next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace tcc
