#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace gsr {

enum class ErrorKind {
  invalid_argument,
  pole,
  accuracy_exhausted,
  singular_factor,
  singular_direction,
  witness_failed,
  not_found,
  precondition_failed,
  run_rejected,
  io,
  usage,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::pole: return "pole";
    case ErrorKind::accuracy_exhausted: return "accuracy-exhausted";
    case ErrorKind::singular_factor: return "singular-factor";
    case ErrorKind::singular_direction: return "singular-direction";
    case ErrorKind::witness_failed: return "witness-failed";
    case ErrorKind::not_found: return "not-found";
    case ErrorKind::precondition_failed: return "precondition-failed";
    case ErrorKind::run_rejected: return "run-rejected";
    case ErrorKind::io: return "io";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

/// Library-wide exception. `value` carries the quantity relevant to the
/// failure when there is one (achieved error bound, achieved sup, search
/// bound).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::optional<double> value = std::nullopt)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind),
        value_(value) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<double> value() const noexcept { return value_; }

 private:
  ErrorKind kind_;
  std::optional<double> value_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what,
                              std::optional<double> value = std::nullopt) {
  throw Error(kind, what, value);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::invalid_argument, what);
}

}  // namespace gsr
