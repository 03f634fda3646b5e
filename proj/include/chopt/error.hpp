#pragma once

#include <stdexcept>
#include <string>

namespace chopt {

enum class ErrorKind {
  Domain,
  Dimension,
  ShapeMismatch,
  InvalidArgument,
  Config,
  NewtonDivergence,
  SeparationViolation,
  NanDetected,
  LineSearchFailure,
  Io,
};

const char* to_string(ErrorKind kind);

/// Every failure in the library surfaces as this exception; the C API maps
/// `kind()` onto its status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace chopt
