#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace misport {

enum class ErrorCode {
  Parse,
  EmptyUniverse,
  InsufficientData,
  Index,
  UndefinedDensity,
  InvalidPenalty,
  Decode,
  SizeLimit,
  Timeout,
  Divergence,
  InvalidArgument,
  EmptyPortfolio,
  ZeroVolatility,
  Data,
  Accounting,
  Range,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can branch without string matching.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace misport
