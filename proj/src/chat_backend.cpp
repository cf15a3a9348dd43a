#include "kgeval/chat_backend.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include "kgeval/digest.hpp"
#include "kgeval/error.hpp"
#include "kgeval/io.hpp"

namespace kgeval {

namespace {

using json = nlohmann::json;

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // without trailing slash
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::BackendUnavailable, "endpoint must start with http:// or https://");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

std::string getenv_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string();
}

std::string extract_content(const json& message) {
  const auto& content = message.at("content");
  if (content.is_string()) return content.get<std::string>();
  if (content.is_array()) {
    std::string text;
    for (const auto& part : content) {
      if (part.is_object() && part.value("type", "") == "text") text += part.value("text", "");
    }
    return text;
  }
  throw Error(ErrorCode::BackendUnavailable, "reply content has unexpected type");
}

}  // namespace

HttpBackendConfig HttpBackendConfig::from_environment(std::string model_id,
                                                      std::optional<std::string> reasoning_effort) {
  HttpBackendConfig config;
  config.endpoint = getenv_or_empty(kApiBaseEnv);
  config.model_id = std::move(model_id);
  config.reasoning_effort = std::move(reasoning_effort);
  return config;
}

HttpChatBackend::HttpChatBackend(HttpBackendConfig config)
    : HttpChatBackend(std::move(config), getenv_or_empty(kApiKeyEnv)) {}

HttpChatBackend::HttpChatBackend(HttpBackendConfig config, std::string api_key)
    : config_(std::move(config)), api_key_(std::move(api_key)) {}

std::string HttpChatBackend::request_body(const ChatRequest& request) const {
  json content = json::array();
  content.push_back({{"type", "text"}, {"text", request.prompt}});
  if (!request.image_bytes.empty()) {
    content.push_back({{"type", "image_url"},
                       {"image_url",
                        {{"url", "data:" + request.media_type + ";base64," + base64_encode(request.image_bytes)}}}});
  }
  json body = {{"model", config_.model_id},
               {"messages", json::array({{{"role", "user"}, {"content", std::move(content)}}})}};
  if (config_.reasoning_effort) body["reasoning_effort"] = *config_.reasoning_effort;
  return body.dump();
}

std::string HttpChatBackend::send(const ChatRequest& request) {
  if (config_.endpoint.empty()) {
    throw Error(ErrorCode::BackendUnavailable, std::string("no endpoint configured (set ") + kApiBaseEnv + ")");
  }
  const SplitUrl url = split_url(config_.endpoint);
  httplib::Client client(url.origin);
  client.set_connection_timeout(std::chrono::seconds(30));
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);

  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  auto res = client.Post(url.path + "/chat/completions", headers, request_body(request), "application/json");
  if (!res) {
    throw Error(ErrorCode::BackendUnavailable,
                "request to " + url.origin + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 429) {
    double retry_after = 1.0;
    if (res->has_header("Retry-After")) {
      const std::string v = res->get_header_value("Retry-After");
      char* end = nullptr;
      const double parsed = std::strtod(v.c_str(), &end);
      if (end != v.c_str() && parsed >= 0.0) retry_after = parsed;
    }
    throw RateLimitedError("backend rate limited the request", retry_after);
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorCode::BackendUnavailable, "backend answered HTTP " + std::to_string(res->status));
  }
  try {
    json reply = json::parse(res->body);
    return extract_content(reply.at("choices").at(0).at("message"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BackendUnavailable, std::string("unexpected reply shape: ") + e.what());
  }
}

ReplayBackend::ReplayBackend(std::filesystem::path dir, std::string model_id)
    : dir_(std::move(dir)), model_id_(std::move(model_id)) {}

std::string ReplayBackend::send(const ChatRequest& request) {
  const auto path = dir_ / (request.item_id + ".txt");
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::BackendUnavailable, "no canned reply at " + path.string());
  }
  return read_file(path);
}

std::string media_type_for(const std::filesystem::path& image_path) {
  std::string ext = image_path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".webp") return "image/webp";
  if (ext == ".gif") return "image/gif";
  return "image/png";
}

}  // namespace kgeval
