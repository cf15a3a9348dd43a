#include <json.hpp>

#include "kgeval/digest.hpp"
#include "kgeval/error.hpp"
#include "kgeval/grounding.hpp"
#include "kgeval/io.hpp"

namespace kgeval {

using ordered_json = nlohmann::ordered_json;

TranscriptCache::TranscriptCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::string TranscriptCache::key(std::string_view item_id, std::string_view model,
                                 std::string_view request_hash) {
  std::string material;
  material.append(item_id).push_back('\n');
  material.append(model).push_back('\n');
  material.append(request_hash);
  return sha256_hex(material);
}

std::filesystem::path TranscriptCache::path_for(const std::string& key) const {
  return dir_ / (key + ".json");
}

std::optional<Transcript> TranscriptCache::load(const std::string& key) const {
  std::lock_guard lock(mutex_);
  const auto path = path_for(key);
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    auto j = ordered_json::parse(read_file(path));
    Transcript t;
    t.request_hash = j.at("request_hash").get<std::string>();
    t.model = j.at("model").get<std::string>();
    t.reply_text = j.at("reply_text").get<std::string>();
    t.timestamp = j.value("timestamp", "");
    return t;
  } catch (const ordered_json::exception&) {
    return std::nullopt;
  }
}

void TranscriptCache::store(const std::string& key, const Transcript& t) {
  ordered_json j;
  j["request_hash"] = t.request_hash;
  j["model"] = t.model;
  j["reply_text"] = t.reply_text;
  j["timestamp"] = t.timestamp;
  std::lock_guard lock(mutex_);
  write_file_atomic(path_for(key), j.dump(2) + "\n");
}

}  // namespace kgeval
