#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stylos {

enum class ErrorCode {
  MissingFile,
  DuplicateId,
  EmptyManifest,
  InvalidPattern,
  EmptyDocument,
  TooFewSegments,
  InsufficientDistinctPairs,
  EmptyTrainingSet,
  SingleClass,
  DimensionMismatch,
  MissingAnnotation,
  NonFinite,
  NoConvergence,
  TooFewPerClass,
  TooFewPoints,
  TargetAuthorMissing,
  LengthMismatch,
  UnknownClass,
  EmptyTestSet,
  NoCandidate,
  ParseError,
  CoverageGap,
  DegenerateLabels,
  InvalidArgument,
  NotFound,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception; `code()` is stable and is
// what the service maps onto HTTP status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace stylos
