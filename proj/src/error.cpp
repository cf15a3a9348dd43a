#include "kgeval/error.hpp"

namespace kgeval {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyLabel: return "EmptyLabel";
    case ErrorCode::DuplicateEntity: return "DuplicateEntity";
    case ErrorCode::DuplicateDependency: return "DuplicateDependency";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::InvalidModifier: return "InvalidModifier";
    case ErrorCode::UnknownPredicate: return "UnknownPredicate";
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::NestingTooDeep: return "NestingTooDeep";
    case ErrorCode::UnbalancedParens: return "UnbalancedParens";
    case ErrorCode::InvalidUtf8: return "InvalidUtf8";
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::InvalidLevel: return "InvalidLevel";
    case ErrorCode::InvalidDiscipline: return "InvalidDiscipline";
    case ErrorCode::VerdictKeyMismatch: return "VerdictKeyMismatch";
    case ErrorCode::EmptyReference: return "EmptyReference";
    case ErrorCode::SizeCapExceeded: return "SizeCapExceeded";
    case ErrorCode::InvalidRegion: return "InvalidRegion";
    case ErrorCode::InvalidThresholds: return "InvalidThresholds";
    case ErrorCode::NoStructuredBlock: return "NoStructuredBlock";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::ExhaustedRetries: return "ExhaustedRetries";
    case ErrorCode::MissingImage: return "MissingImage";
    case ErrorCode::MissingRegions: return "MissingRegions";
    case ErrorCode::EmptyManifest: return "EmptyManifest";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::InvalidRating: return "InvalidRating";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {
std::string format_what(ErrorCode code, const std::string& message,
                        const std::optional<std::size_t>& position) {
  std::string out(to_string(code));
  if (position) out += " at " + std::to_string(*position);
  out += ": ";
  out += message;
  return out;
}
}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> position)
    : std::runtime_error(format_what(code, message, position)),
      code_(code),
      position_(position),
      detail_(message) {}

}  // namespace kgeval
