#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace superproj {

enum class ErrorKind {
  DimensionMismatch,
  UnknownCoordinate,
  NonHomogeneous,
  NotInvertible,
  SingularDimension,
  SingularWeight,
  Degenerate,
  WrongWeight,
  WrongParity,
  ParseError,
  ValidationError,
};

constexpr std::string_view kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::UnknownCoordinate: return "UnknownCoordinate";
    case ErrorKind::NonHomogeneous: return "NonHomogeneous";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::SingularDimension: return "SingularDimension";
    case ErrorKind::SingularWeight: return "SingularWeight";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::WrongWeight: return "WrongWeight";
    case ErrorKind::WrongParity: return "WrongParity";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

/// Every failure raised by the kernel carries one of the kinds above so that
/// reports can name it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace superproj
