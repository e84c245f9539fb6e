#include "core/error.hpp"

namespace hfl {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::DepthExceeded: return "DepthExceeded";
    case ErrorCode::InvalidEnvelope: return "InvalidEnvelope";
    case ErrorCode::BetaPole: return "BetaPole";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NonIntegerOnly: return "NonIntegerOnly";
    case ErrorCode::Inconclusive: return "Inconclusive";
    case ErrorCode::BracketScanExhausted: return "BracketScanExhausted";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::HorizonTooShort: return "HorizonTooShort";
    case ErrorCode::SeriesNotConverged: return "SeriesNotConverged";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

}  // namespace hfl
