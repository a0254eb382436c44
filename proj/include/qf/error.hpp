#ifndef QF_ERROR_HPP
#define QF_ERROR_HPP

#include <stdexcept>
#include <string>

namespace qf {

enum class ErrorKind {
  InvalidForm,
  InvalidDiscriminant,
  DiscriminantMismatch,
  BoundExceeded,
  InvalidP,
  InvalidN,
  NotCoprime,
  SizeViolation,
  DegenerateField,
  FactorizationFailure,
  InternalInvariantViolation,
  OracleMismatch,
  ConfigInvalid,
  IOFailure,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidForm: return "InvalidForm";
    case ErrorKind::InvalidDiscriminant: return "InvalidDiscriminant";
    case ErrorKind::DiscriminantMismatch: return "DiscriminantMismatch";
    case ErrorKind::BoundExceeded: return "BoundExceeded";
    case ErrorKind::InvalidP: return "InvalidP";
    case ErrorKind::InvalidN: return "InvalidN";
    case ErrorKind::NotCoprime: return "NotCoprime";
    case ErrorKind::SizeViolation: return "SizeViolation";
    case ErrorKind::DegenerateField: return "DegenerateField";
    case ErrorKind::FactorizationFailure: return "FactorizationFailure";
    case ErrorKind::InternalInvariantViolation: return "InternalInvariantViolation";
    case ErrorKind::OracleMismatch: return "OracleMismatch";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::IOFailure: return "IOFailure";
  }
  return "Unknown";
}

/// Domain error carrying a machine-readable kind; the CLI maps these to
/// exit code 1 with the kind on stderr.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  const char* kind_name() const noexcept { return to_string(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace qf

#endif  // QF_ERROR_HPP
