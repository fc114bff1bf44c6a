#include "pspi/error.hpp"

namespace pspi {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::NotHermitian: return "not-hermitian";
    case ErrorKind::InsufficientDimension: return "insufficient-dimension";
    case ErrorKind::DomainTooSmall: return "domain-too-small";
    case ErrorKind::UnsupportedSymbol: return "unsupported-symbol";
    case ErrorKind::Caustic: return "caustic";
    case ErrorKind::RegularizationFailure: return "regularization-failure";
    case ErrorKind::InvalidConfig: return "invalid-config";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
    case ErrorKind::ReportMismatch: return "report-mismatch";
  }
  return "unknown";
}

bool is_certificate_failure(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InsufficientDimension:
    case ErrorKind::DomainTooSmall:
    case ErrorKind::Caustic:
    case ErrorKind::RegularizationFailure:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace pspi
