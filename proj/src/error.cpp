#include "misport/error.hpp"

namespace misport {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Parse: return "parse";
    case ErrorCode::EmptyUniverse: return "empty-universe";
    case ErrorCode::InsufficientData: return "insufficient-data";
    case ErrorCode::Index: return "index";
    case ErrorCode::UndefinedDensity: return "undefined-density";
    case ErrorCode::InvalidPenalty: return "invalid-penalty";
    case ErrorCode::Decode: return "decode";
    case ErrorCode::SizeLimit: return "size-limit";
    case ErrorCode::Timeout: return "timeout";
    case ErrorCode::Divergence: return "divergence";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::EmptyPortfolio: return "empty-portfolio";
    case ErrorCode::ZeroVolatility: return "zero-volatility";
    case ErrorCode::Data: return "data";
    case ErrorCode::Accounting: return "accounting";
    case ErrorCode::Range: return "range";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

}  // namespace misport
