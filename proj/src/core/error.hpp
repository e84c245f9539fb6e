#pragma once

#include <stdexcept>
#include <string>

namespace hfl {

// Failure categories shared by every module. The C API maps these one-to-one
// onto hfl_status codes, so new values must be appended, never reordered.
enum class ErrorCode {
  InvalidArgument = 1,
  OutOfDomain,
  DepthExceeded,
  InvalidEnvelope,
  BetaPole,
  NoConvergence,
  NonIntegerOnly,
  Inconclusive,
  BracketScanExhausted,
  IndexOutOfRange,
  HorizonTooShort,
  SeriesNotConverged,
  ConfigInvalid,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const char* what) {
  if (!cond) throw Error(code, what);
}

}  // namespace hfl
