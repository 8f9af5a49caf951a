#include "smtm/error.hpp"

namespace smtm {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NorthPoleSingularity: return "NorthPoleSingularity";
    case ErrorCode::DegenerateProposal: return "DegenerateProposal";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonIntegrable: return "NonIntegrable";
    case ErrorCode::AllWeightsDegenerate: return "AllWeightsDegenerate";
    case ErrorCode::NegativeVariance: return "NegativeVariance";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::RetentionTooCoarse: return "RetentionTooCoarse";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::IOFailure: return "IOFailure";
  }
  return "Unknown";
}

}  // namespace smtm
