#include "reachfit/error.hpp"

namespace reachfit {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::BadSampling: return "BadSampling";
    case ErrorCode::BadCutoff: return "BadCutoff";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::DegenerateProfile: return "DegenerateProfile";
    case ErrorCode::MissingData: return "MissingData";
    case ErrorCode::InsufficientInliers: return "InsufficientInliers";
    case ErrorCode::NotAnEllipse: return "NotAnEllipse";
    case ErrorCode::BadDuration: return "BadDuration";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DegenerateLine: return "DegenerateLine";
    case ErrorCode::NoConicPointInRange: return "NoConicPointInRange";
    case ErrorCode::TooFewTrials: return "TooFewTrials";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::BadSpec: return "BadSpec";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace reachfit
