#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace semiuniform {

enum class ErrorKind {
  InvalidArgument,
  InsufficientPrecision,
  BitBudgetExceeded,
  TableExhausted,
  CeilingUndecidable,
  MonotonicityViolation,
  OutOfRange,
  SingularMatrix,
  BelowRange,
  MissingCertificate,
  SkewnessViolation,
  SymmetryViolation,
  DefinitenessViolation,
  RankViolation,
  RankDeficient,
  DimensionMismatch,
  ExpOverflow,
  SingularBoundaryMatrix,
  QuadratureTooCoarse,
  ParseError,
};

constexpr std::string_view to_string(ErrorKind k) noexcept {
  switch (k) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InsufficientPrecision: return "InsufficientPrecision";
    case ErrorKind::BitBudgetExceeded: return "BitBudgetExceeded";
    case ErrorKind::TableExhausted: return "TableExhausted";
    case ErrorKind::CeilingUndecidable: return "CeilingUndecidable";
    case ErrorKind::MonotonicityViolation: return "MonotonicityViolation";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::BelowRange: return "BelowRange";
    case ErrorKind::MissingCertificate: return "MissingCertificate";
    case ErrorKind::SkewnessViolation: return "SkewnessViolation";
    case ErrorKind::SymmetryViolation: return "SymmetryViolation";
    case ErrorKind::DefinitenessViolation: return "DefinitenessViolation";
    case ErrorKind::RankViolation: return "RankViolation";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ExpOverflow: return "ExpOverflow";
    case ErrorKind::SingularBoundaryMatrix: return "SingularBoundaryMatrix";
    case ErrorKind::QuadratureTooCoarse: return "QuadratureTooCoarse";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one ErrorKind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace semiuniform
