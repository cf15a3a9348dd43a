#pragma once
// Chat-completion backends. Grounding only needs "send prompt + image, get
// text back", so any vision-capable model fits behind this interface.

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace kgeval {

struct ChatRequest {
  /// Benchmark item the request belongs to; used by replay backends and caches.
  std::string item_id;
  std::string prompt;
  std::string image_bytes;
  std::string media_type = "image/png";
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string model_id() const = 0;
  /// Returns the assistant reply text. Throws Error{BackendUnavailable} or
  /// RateLimitedError.
  virtual std::string send(const ChatRequest& request) = 0;
};

inline constexpr const char* kApiKeyEnv = "KGEVAL_API_KEY";
inline constexpr const char* kApiBaseEnv = "KGEVAL_API_BASE";

struct HttpBackendConfig {
  /// Base URL such as "https://api.example.com/v1"; requests go to
  /// <endpoint>/chat/completions.
  std::string endpoint;
  std::string model_id;
  std::optional<std::string> reasoning_effort;
  std::chrono::seconds timeout{600};

  /// Endpoint from KGEVAL_API_BASE. The API key is read from KGEVAL_API_KEY by
  /// the backend itself and never stored here.
  static HttpBackendConfig from_environment(std::string model_id,
                                            std::optional<std::string> reasoning_effort = std::nullopt);
};

/// OpenAI-compatible message list with a base64 data-URL image part:
///   {"model", "messages": [{"role": "user", "content": [
///       {"type": "text", "text": ...},
///       {"type": "image_url", "image_url": {"url": "data:<mime>;base64,..."}}]}],
///    "reasoning_effort"?}
/// The reply is choices[0].message.content.
class HttpChatBackend final : public ChatBackend {
 public:
  /// Reads the API key from KGEVAL_API_KEY (may be empty for local servers).
  explicit HttpChatBackend(HttpBackendConfig config);
  HttpChatBackend(HttpBackendConfig config, std::string api_key);

  std::string model_id() const override { return config_.model_id; }
  std::string send(const ChatRequest& request) override;

  /// Request body without credentials; exposed for tests and audits.
  std::string request_body(const ChatRequest& request) const;

 private:
  HttpBackendConfig config_;
  std::string api_key_;
};

/// Offline backend answering from <dir>/<item_id>.txt. A missing file is
/// reported as BackendUnavailable.
class ReplayBackend final : public ChatBackend {
 public:
  ReplayBackend(std::filesystem::path dir, std::string model_id);
  std::string model_id() const override { return model_id_; }
  std::string send(const ChatRequest& request) override;

 private:
  std::filesystem::path dir_;
  std::string model_id_;
};

/// Backend built from a callable; handy for scripted fakes.
class FunctionBackend final : public ChatBackend {
 public:
  using Handler = std::function<std::string(const ChatRequest&)>;
  FunctionBackend(std::string model_id, Handler handler)
      : model_id_(std::move(model_id)), handler_(std::move(handler)) {}
  std::string model_id() const override { return model_id_; }
  std::string send(const ChatRequest& request) override { return handler_(request); }

 private:
  std::string model_id_;
  Handler handler_;
};

/// "image/png", "image/jpeg", "image/webp" or "image/gif" by extension.
std::string media_type_for(const std::filesystem::path& image_path);

}  // namespace kgeval
