#pragma once
// End-to-end evaluation of manifest items: ground the reference graph in the
// generated image, count merged regions, and combine both into the score.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kgeval/chat_backend.hpp"
#include "kgeval/grounding.hpp"
#include "kgeval/manifest.hpp"
#include "kgeval/report.hpp"
#include "kgeval/scoring.hpp"

namespace kgeval {

struct EvalConfig {
  ReadabilityConfig readability;
  ErrorThresholds thresholds;
  EndpointPolicy endpoint_policy = EndpointPolicy::Drop;
  /// Knowledge fidelity only: readability is forced to 1 and region files become optional.
  bool ged_only = false;
  /// Concurrent items (and therefore backend requests) in evaluate_batch.
  std::size_t max_inflight = 8;
  std::optional<std::filesystem::path> cache_dir;
  RetryPolicy retry;
  Sleeper sleep;
  /// Run as `<cmd> emit --image <img> --out <regions>` when a regions file is missing.
  std::optional<std::string> sidecar_command;
};

/// Throws MissingImage, MissingRegions, or the grounding/backend error, with
/// the item id in the message.
ItemResult evaluate_item(const ManifestItem& item, ChatBackend& backend, const EvalConfig& config,
                         TranscriptCache* cache = nullptr);

/// Evaluates items on up to config.max_inflight threads; per-item failures are
/// recorded, not thrown. Output order follows the manifest regardless of
/// scheduling. The backend must tolerate concurrent send() calls.
/// Throws EmptyManifest.
Report evaluate_batch(const std::vector<ManifestItem>& items, ChatBackend& backend, const EvalConfig& config,
                      const ReportOptions& report_options = {});

}  // namespace kgeval
