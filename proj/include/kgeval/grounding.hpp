#pragma once
// Grounding a reference graph into an image through a chat backend, with
// retries and an on-disk transcript cache.

#include <chrono>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>

#include "kgeval/chat_backend.hpp"
#include "kgeval/eval_prompt.hpp"

namespace kgeval {

struct Transcript {
  std::string request_hash;
  std::string model;
  std::string reply_text;
  std::string timestamp;  // ISO 8601, UTC
};

/// One JSON file per (item id, model, request hash) key:
///   {"request_hash", "model", "reply_text", "timestamp"}
/// Safe to share between worker threads.
class TranscriptCache {
 public:
  explicit TranscriptCache(std::filesystem::path dir);

  static std::string key(std::string_view item_id, std::string_view model, std::string_view request_hash);

  std::optional<Transcript> load(const std::string& key) const;
  void store(const std::string& key, const Transcript& transcript);
  std::filesystem::path path_for(const std::string& key) const;
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
  mutable std::mutex mutex_;
};

/// Hash of the rendered prompt and the attached image bytes.
std::string request_hash(const ChatRequest& request);

struct RetryPolicy {
  /// Extra attempts after the first one.
  int max_retries = 2;
  std::chrono::milliseconds initial_backoff{1000};
  double backoff_multiplier = 2.0;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

struct GroundingOptions {
  std::string item_id;
  RetryPolicy retry;
  TranscriptCache* cache = nullptr;
  /// Defaults to std::this_thread::sleep_for.
  Sleeper sleep;
  PromptOptions prompt;
};

struct ImageAttachment {
  std::string bytes;
  std::string media_type = "image/png";
};

struct GroundingOutcome {
  ParsedEvalResponse parsed;
  Transcript transcript;
  int attempts = 0;
  bool from_cache = false;
};

/// Renders the prompt, sends it with the image, and parses the reply.
/// Unparseable replies and unavailable backends are retried with exponential
/// backoff (rate limits wait at least Retry-After). After the last attempt:
/// ExhaustedRetries for unparseable replies, otherwise the backend's error.
/// A cached transcript that still parses short-circuits the backend call.
GroundingOutcome ground_image(const ImageAttachment& image, const KnowledgeGraph& ref,
                              ChatBackend& backend, const GroundingOptions& options = {});

}  // namespace kgeval
