#pragma once

#include <stdexcept>
#include <string>

namespace fkdv {

enum class ErrorKind {
  InvalidArgument,
  NearSingularity,
  NonpositiveLambda,
  GridMismatch,
  BaseMismatch,
  NoConvergence,
  Inadmissible,
  LeftAdmissibleSet,
  InsufficientTail,
  InsufficientModes,
  WindowTooNarrow,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every library failure carries a kind so callers (CLI, continuation) can
/// react without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fkdv
