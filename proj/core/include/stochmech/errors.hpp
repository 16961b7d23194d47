#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stochmech {

enum class ErrorCode {
  InvalidArgument,
  Unsupported,
  BoundaryLeak,
  NormDrift,
  NodeDetected,
  UnwrapInconsistent,
  Diverged,
  AmplitudeInfeasible,
  SupportLeak,
  ConfigError,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Base exception for everything the library throws. The code lets callers
/// (the experiment runner in particular) distinguish failure classes without
/// string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& what);

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) raise(code, what);
}

}  // namespace stochmech
