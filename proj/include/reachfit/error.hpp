#pragma once

#include <stdexcept>
#include <string>

namespace reachfit {

enum class ErrorCode {
  DegenerateInput,
  BadSampling,
  BadCutoff,
  TooShort,
  DegenerateProfile,
  MissingData,
  InsufficientInliers,
  NotAnEllipse,
  BadDuration,
  OutOfRange,
  DegenerateLine,
  NoConicPointInRange,
  TooFewTrials,
  DegenerateData,
  BadSpec,
  ParseError,
  ValidationError,
  ConfigError,
  IoError,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries a machine-readable code so the
// C API and the exclusion records can report it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace reachfit
