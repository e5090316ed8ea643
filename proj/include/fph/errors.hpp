#pragma once

#include <stdexcept>
#include <string>

namespace fph {

enum class ErrorKind {
  UnstableCouplings,
  BadGeometry,
  BadArgument,
  TruncationTooLarge,
  ModeOutOfWindow,
  ZeroMode,
  DegenerateBranches,
  GridTooSmall,
  BadRegulator,
  TailTooLarge,
  SelectionViolated,
  SingularConfiguration,
  ConfigError,
  UnknownIdentity,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so the
/// CLI can map it onto an exit code without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fph
