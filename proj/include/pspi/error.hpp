#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pspi {

enum class ErrorKind {
  InvalidDimension,
  NotHermitian,
  InsufficientDimension,
  DomainTooSmall,
  UnsupportedSymbol,
  Caustic,
  RegularizationFailure,
  InvalidConfig,
  Parse,
  Io,
  ReportMismatch,
};

std::string_view to_string(ErrorKind kind);

// Certificate failures are numerical: the inputs were valid but the
// requested discretization cannot certify its own accuracy.
bool is_certificate_failure(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace pspi
