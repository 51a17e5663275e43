#include "stylos/error.hpp"

namespace stylos {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::EmptyManifest: return "EmptyManifest";
    case ErrorCode::InvalidPattern: return "InvalidPattern";
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::TooFewSegments: return "TooFewSegments";
    case ErrorCode::InsufficientDistinctPairs: return "InsufficientDistinctPairs";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MissingAnnotation: return "MissingAnnotation";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::TooFewPerClass: return "TooFewPerClass";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::TargetAuthorMissing: return "TargetAuthorMissing";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::EmptyTestSet: return "EmptyTestSet";
    case ErrorCode::NoCandidate: return "NoCandidate";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::CoverageGap: return "CoverageGap";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotFound: return "NotFound";
  }
  return "Unknown";
}

}  // namespace stylos
