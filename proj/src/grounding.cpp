#include "kgeval/grounding.hpp"

#include <ctime>
#include <thread>

#include "kgeval/digest.hpp"
#include "kgeval/error.hpp"

namespace kgeval {

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string request_hash(const ChatRequest& request) {
  std::string material = request.prompt;
  material.push_back('\0');
  material += request.media_type;
  material.push_back('\0');
  material += sha256_hex(request.image_bytes);
  return sha256_hex(material);
}

GroundingOutcome ground_image(const ImageAttachment& image, const KnowledgeGraph& ref,
                              ChatBackend& backend, const GroundingOptions& options) {
  EvalPromptBundle bundle = render_eval_prompt(ref, options.prompt);
  ChatRequest request;
  request.item_id = options.item_id;
  request.prompt = std::move(bundle.text);
  request.image_bytes = image.bytes;
  request.media_type = image.media_type;

  const std::string hash = request_hash(request);
  const std::string model = backend.model_id();
  std::string cache_key;
  if (options.cache) {
    cache_key = TranscriptCache::key(options.item_id, model, hash);
    if (auto cached = options.cache->load(cache_key)) {
      try {
        GroundingOutcome out;
        out.parsed = parse_eval_response(cached->reply_text, ref);
        out.transcript = std::move(*cached);
        out.from_cache = true;
        return out;
      } catch (const Error&) {
        // Stale or unusable entry; fall through to a live call.
      }
    }
  }

  const Sleeper sleep = options.sleep ? options.sleep : Sleeper([](std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
  });
  auto backoff = options.retry.initial_backoff;
  const int max_attempts = 1 + std::max(0, options.retry.max_retries);
  std::string last_problem;

  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    const bool last = attempt == max_attempts;
    auto wait = backoff;
    try {
      std::string reply = backend.send(request);
      try {
        GroundingOutcome out;
        out.parsed = parse_eval_response(reply, ref);
        out.transcript = Transcript{hash, model, std::move(reply), utc_timestamp()};
        out.attempts = attempt;
        if (options.cache) options.cache->store(cache_key, out.transcript);
        return out;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoStructuredBlock) throw;
        last_problem = e.detail();
        if (last) break;
      }
    } catch (const RateLimitedError& e) {
      if (last) throw;
      wait = std::max(wait, std::chrono::milliseconds(static_cast<long long>(e.retry_after_seconds() * 1000.0)));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BackendUnavailable || last) throw;
    }
    sleep(wait);
    backoff = std::chrono::milliseconds(
        static_cast<long long>(static_cast<double>(backoff.count()) * options.retry.backoff_multiplier));
  }
  throw Error(ErrorCode::ExhaustedRetries, "no usable reply after " + std::to_string(max_attempts) +
                                               " attempts: " + last_problem);
}

}  // namespace kgeval
