#include "stochmech/errors.hpp"

namespace stochmech {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::BoundaryLeak: return "BoundaryLeak";
    case ErrorCode::NormDrift: return "NormDrift";
    case ErrorCode::NodeDetected: return "NodeDetected";
    case ErrorCode::UnwrapInconsistent: return "UnwrapInconsistent";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::AmplitudeInfeasible: return "AmplitudeInfeasible";
    case ErrorCode::SupportLeak: return "SupportLeak";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void raise(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace stochmech
