#include "fph/errors.hpp"

namespace fph {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::UnstableCouplings: return "UnstableCouplings";
    case ErrorKind::BadGeometry: return "BadGeometry";
    case ErrorKind::BadArgument: return "BadArgument";
    case ErrorKind::TruncationTooLarge: return "TruncationTooLarge";
    case ErrorKind::ModeOutOfWindow: return "ModeOutOfWindow";
    case ErrorKind::ZeroMode: return "ZeroMode";
    case ErrorKind::DegenerateBranches: return "DegenerateBranches";
    case ErrorKind::GridTooSmall: return "GridTooSmall";
    case ErrorKind::BadRegulator: return "BadRegulator";
    case ErrorKind::TailTooLarge: return "TailTooLarge";
    case ErrorKind::SelectionViolated: return "SelectionViolated";
    case ErrorKind::SingularConfiguration: return "SingularConfiguration";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::UnknownIdentity: return "UnknownIdentity";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace fph
