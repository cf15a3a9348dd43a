#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kgeval {

enum class ErrorCode {
  // kg-model
  EmptyLabel,
  DuplicateEntity,
  DuplicateDependency,
  DanglingReference,
  InvalidModifier,
  // kg-dsl
  UnknownPredicate,
  ArityError,
  NestingTooDeep,
  UnbalancedParens,
  InvalidUtf8,
  MalformedJson,
  MalformedLine,
  InvalidLevel,
  InvalidDiscipline,
  // graph-fidelity
  VerdictKeyMismatch,
  EmptyReference,
  SizeCapExceeded,
  // readability
  InvalidRegion,
  InvalidThresholds,
  // extraction
  NoStructuredBlock,
  BackendUnavailable,
  RateLimited,
  ExhaustedRetries,
  // harness
  MissingImage,
  MissingRegions,
  EmptyManifest,
  LengthMismatch,
  ZeroVariance,
  NoOverlap,
  InvalidRating,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure the library reports is an Error carrying a machine-readable
/// code. `position` holds an array index or line number when the failure can
/// be located in its input.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> position = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::optional<std::size_t>& position() const noexcept { return position_; }
  /// Message without the "<Code>: " prefix that what() carries.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> position_;
  std::string detail_;
};

/// Backend asked us to slow down; retry_after_seconds mirrors the Retry-After header.
class RateLimitedError : public Error {
 public:
  RateLimitedError(const std::string& message, double retry_after_seconds)
      : Error(ErrorCode::RateLimited, message), retry_after_seconds_(retry_after_seconds) {}
  double retry_after_seconds() const noexcept { return retry_after_seconds_; }

 private:
  double retry_after_seconds_;
};

}  // namespace kgeval
