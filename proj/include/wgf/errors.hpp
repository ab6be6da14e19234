#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wgf {

enum class ErrorKind {
  NonAdmissibleMap,
  MapDistorted,
  OutOfRange,
  KernelSingularity,
  MissingPrevState,
  SingularJacobian,
  NoConvergence,
  AdmissibilityStall,
  ZeroPivot,
  SolverBreakdown,
  DegenerateStencil,
  ZeroDensity,
  EmptyTrace,
  NonNestedGrids,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the named kinds above.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when a 2D map loses a positive Jacobian determinant at node (i, j).
class MapDistortedError : public Error {
 public:
  MapDistortedError(std::ptrdiff_t i, std::ptrdiff_t j, double det)
      : Error(ErrorKind::MapDistorted,
              "determinant " + std::to_string(det) + " at node (" + std::to_string(i) + ", " +
                  std::to_string(j) + ")"),
        i_(i), j_(j), det_(det) {}

  std::ptrdiff_t i() const noexcept { return i_; }
  std::ptrdiff_t j() const noexcept { return j_; }
  double det() const noexcept { return det_; }

 private:
  std::ptrdiff_t i_, j_;
  double det_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : Error(ErrorKind::ParseError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_, column_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(ErrorKind::ValidationError, field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonAdmissibleMap: return "NonAdmissibleMap";
    case ErrorKind::MapDistorted: return "MapDistorted";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::KernelSingularity: return "KernelSingularity";
    case ErrorKind::MissingPrevState: return "MissingPrevState";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::AdmissibilityStall: return "AdmissibilityStall";
    case ErrorKind::ZeroPivot: return "ZeroPivot";
    case ErrorKind::SolverBreakdown: return "SolverBreakdown";
    case ErrorKind::DegenerateStencil: return "DegenerateStencil";
    case ErrorKind::ZeroDensity: return "ZeroDensity";
    case ErrorKind::EmptyTrace: return "EmptyTrace";
    case ErrorKind::NonNestedGrids: return "NonNestedGrids";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace wgf
