#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <thread>

#include "kgeval/chat_backend.hpp"
#include "kgeval/digest.hpp"
#include "kgeval/error.hpp"
#include "kgeval/eval_prompt.hpp"
#include "kgeval/grounding.hpp"
#include "kgeval/io.hpp"
#include "kgeval/kg_dsl.hpp"

using namespace kgeval;
using namespace std::chrono_literals;

namespace {

KnowledgeGraph neuron() { return parse_kg_json(read_file(std::filesystem::path(KGEVAL_FIXTURE_DIR) / "neuron.kg.json")); }

KnowledgeGraph small() {
  return parse_kg_json(R"J({"Visual Components": {"elements": ["sun", "Water", "evaporation"],
    "dependencies": ["Causes(sun, evaporation)", "Requires(increase(evaporation), water)"]}})J");
}

std::filesystem::path temp_dir(std::string_view name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("kgeval-test-" + std::string(name) + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

constexpr std::string_view kGoodReply = R"(Here is my assessment.
{
  Image_Description: Sunlight over a lake.
  Element_and_Dependency_Analysis: {
    Element_Evaluation: {
      sun: yes
      water: [yes]
      evaporation: no
    },
    Dependency_Evaluation: {
      Causes(sun, evaporation): [no]  [No arrow links them.]
      Requires(increase(evaporation), water): [yes]  [Vapour rises from the water.]
    }
  }
}
)";

GroundingOptions no_sleep(std::vector<std::chrono::milliseconds>* slept = nullptr) {
  GroundingOptions o;
  o.item_id = "item-1";
  o.sleep = [slept](std::chrono::milliseconds d) {
    if (slept) slept->push_back(d);
  };
  return o;
}

}  // namespace

TEST_CASE("prompt template has a single placeholder") {
  const auto t = eval_prompt_template();
  const auto first = t.find(kElemDependPlaceholder);
  REQUIRE(first != std::string_view::npos);
  CHECK(t.find(kElemDependPlaceholder, first + 1) == std::string_view::npos);
  CHECK(t.find("Element_Evaluation") != std::string_view::npos);
  CHECK(t.find("Dependency_Evaluation") != std::string_view::npos);
}

TEST_CASE("rendered prompt lists every reference item") {
  auto ref = neuron();
  auto bundle = render_eval_prompt(ref);
  CHECK(bundle.text.find(kElemDependPlaceholder) == std::string::npos);
  CHECK(bundle.text.find(bundle.elem_depend_block) != std::string::npos);
  for (const auto& e : ref.entities()) CHECK(bundle.elem_depend_block.find("- " + e.display() + "\n") != std::string::npos);
  for (const auto& d : ref.dependencies()) {
    CHECK(bundle.elem_depend_block.find("- " + serialize_dependency(d)) != std::string::npos);
  }
  CHECK(bundle.elem_depend_block.find("Contains(axon, node of Ranvier)") != std::string::npos);
  CHECK_THROWS_AS(render_eval_prompt(KnowledgeGraph{}), Error);
}

TEST_CASE("dependency explanations are appended when counts match") {
  auto ref = parse_kg_json(R"J({"Key Knowledge": {"Dependency Explanation": ["light heats water"]},
    "Visual Components": {"elements": ["sun", "water"], "dependencies": ["Causes(sun, water)"]}})J");
  CHECK(render_eval_prompt(ref).elem_depend_block.find("- Causes(sun, water): light heats water") != std::string::npos);
  PromptOptions off;
  off.include_dependency_explanations = false;
  CHECK(render_eval_prompt(ref, off).elem_depend_block.find("light heats") == std::string::npos);
}

TEST_CASE("loose reply layout") {
  auto ref = small();
  auto parsed = parse_eval_response(kGoodReply, ref);
  const auto& v = parsed.verdicts;
  CHECK(v.entity_verdicts.at(EntityLabel("sun")));
  CHECK(v.entity_verdicts.at(EntityLabel("water")));
  CHECK_FALSE(v.entity_verdicts.at(EntityLabel("evaporation")));
  const auto& causes = v.dependency_verdicts.at(parse_dependency("Causes(sun, evaporation)"));
  CHECK_FALSE(causes.present);
  CHECK(causes.reason == "No arrow links them.");
  CHECK(v.dependency_verdicts.at(parse_dependency("Requires(increase(evaporation), water)")).present);
  CHECK(parsed.image_description == "Sunlight over a lake.");
  CHECK(parsed.extras.empty());
}

TEST_CASE("JSON reply inside a code fence") {
  auto ref = small();
  const std::string reply = R"J(```json
{"Image_Description": "A lake.",
 "Element_and_Dependency_Analysis": {
   "Element_Evaluation": {"Sun": "yes", "water": "no", "unicorn": "yes"},
   "Dependency_Evaluation": {
     "Causes(sun, evaporation)": "yes - rays point at vapour",
     "Requires(increase(evaporation), water)": {"answer": "no", "reason": "not drawn"}}}}
```)J";
  auto parsed = parse_eval_response(reply, ref);
  const auto& v = parsed.verdicts;
  CHECK(v.entity_verdicts.at(EntityLabel("sun")));
  CHECK_FALSE(v.entity_verdicts.at(EntityLabel("water")));
  CHECK_FALSE(v.entity_verdicts.at(EntityLabel("evaporation")));
  CHECK(v.dependency_verdicts.at(parse_dependency("Causes(sun, evaporation)")).present);
  CHECK_FALSE(v.dependency_verdicts.at(parse_dependency("Requires(increase(evaporation), water)")).present);
  CHECK(parsed.image_description == "A lake.");
  REQUIRE(parsed.extras.size() == 1);
  CHECK(parsed.extras[0].find("unicorn") != std::string::npos);
}

TEST_CASE("items missing from the reply default to false") {
  auto ref = small();
  auto parsed = parse_eval_response("Element_Evaluation:\n  sun: yes\n", ref);
  CHECK(parsed.verdicts.entity_verdicts.size() == 3);
  CHECK(parsed.verdicts.dependency_verdicts.size() == 2);
  CHECK_FALSE(parsed.verdicts.entity_verdicts.at(EntityLabel("water")));
  for (const auto& [d, verdict] : parsed.verdicts.dependency_verdicts) {
    CHECK_FALSE(verdict.present);
    CHECK(verdict.reason == kMissingFromResponse);
  }
}

TEST_CASE("unstructured replies are rejected") {
  CHECK_THROWS_AS(parse_eval_response("I cannot help with that.", small()), Error);
  try {
    parse_eval_response("", small());
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoStructuredBlock);
  }
}

TEST_CASE("first answer for a key wins") {
  auto ref = small();
  auto parsed = parse_eval_response("Element_Evaluation:\n sun: no\n SUN: yes\n", ref);
  CHECK_FALSE(parsed.verdicts.entity_verdicts.at(EntityLabel("sun")));
}

TEST_CASE("digests") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(base64_encode("hello") == "aGVsbG8=");
  CHECK(base64_encode("") == "");
}

TEST_CASE("media types") {
  CHECK(media_type_for("a/b.PNG") == "image/png");
  CHECK(media_type_for("x.jpg") == "image/jpeg");
  CHECK(media_type_for("x.jpeg") == "image/jpeg");
  CHECK(media_type_for("x.webp") == "image/webp");
}

TEST_CASE("grounding through a scripted backend") {
  auto ref = small();
  std::string seen_prompt;
  FunctionBackend backend("fake-model", [&](const ChatRequest& r) {
    seen_prompt = r.prompt;
    CHECK(r.item_id == "item-1");
    CHECK(r.image_bytes == "PNGDATA");
    return std::string(kGoodReply);
  });
  auto out = ground_image(ImageAttachment{"PNGDATA", "image/png"}, ref, backend, no_sleep());
  CHECK(out.attempts == 1);
  CHECK_FALSE(out.from_cache);
  CHECK(out.transcript.model == "fake-model");
  CHECK(out.transcript.reply_text == kGoodReply);
  CHECK(seen_prompt.find("Requires(increase(evaporation), water)") != std::string::npos);
  CHECK(out.parsed.verdicts.entity_verdicts.at(EntityLabel("sun")));
}

TEST_CASE("garbled replies are retried with exponential backoff") {
  auto ref = small();
  int calls = 0;
  FunctionBackend backend("fake", [&](const ChatRequest&) {
    ++calls;
    return calls < 3 ? std::string("no idea") : std::string(kGoodReply);
  });
  std::vector<std::chrono::milliseconds> slept;
  auto out = ground_image(ImageAttachment{"x"}, ref, backend, no_sleep(&slept));
  CHECK(out.attempts == 3);
  CHECK(slept == std::vector<std::chrono::milliseconds>{1000ms, 2000ms});
}

TEST_CASE("persistent garbage exhausts retries") {
  FunctionBackend backend("fake", [](const ChatRequest&) { return std::string("nothing useful"); });
  try {
    ground_image(ImageAttachment{"x"}, small(), backend, no_sleep());
    FAIL("expected ExhaustedRetries");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ExhaustedRetries);
  }
}

TEST_CASE("unavailable backends are retried then reported") {
  int calls = 0;
  FunctionBackend backend("fake", [&](const ChatRequest&) -> std::string {
    ++calls;
    throw Error(ErrorCode::BackendUnavailable, "down");
  });
  try {
    ground_image(ImageAttachment{"x"}, small(), backend, no_sleep());
    FAIL("expected BackendUnavailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BackendUnavailable);
  }
  CHECK(calls == 3);
}

TEST_CASE("rate limits wait at least Retry-After") {
  int calls = 0;
  FunctionBackend backend("fake", [&](const ChatRequest&) -> std::string {
    if (++calls == 1) throw RateLimitedError("slow", 5.0);
    return std::string(kGoodReply);
  });
  std::vector<std::chrono::milliseconds> slept;
  auto out = ground_image(ImageAttachment{"x"}, small(), backend, no_sleep(&slept));
  CHECK(out.attempts == 2);
  REQUIRE(slept.size() == 1);
  CHECK(slept[0] >= 5000ms);
}

TEST_CASE("transcript cache short-circuits the backend") {
  const auto dir = temp_dir("cache");
  TranscriptCache cache(dir);
  int calls = 0;
  FunctionBackend backend("fake", [&](const ChatRequest&) {
    ++calls;
    return std::string(kGoodReply);
  });
  auto options = no_sleep();
  options.cache = &cache;
  auto first = ground_image(ImageAttachment{"img"}, small(), backend, options);
  auto second = ground_image(ImageAttachment{"img"}, small(), backend, options);
  CHECK(calls == 1);
  CHECK_FALSE(first.from_cache);
  CHECK(second.from_cache);
  CHECK(second.parsed.verdicts == first.parsed.verdicts);

  // A different image is a different request.
  ground_image(ImageAttachment{"other"}, small(), backend, options);
  CHECK(calls == 2);

  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    ++files;
    auto j = nlohmann::json::parse(read_file(entry.path()));
    CHECK(j.contains("request_hash"));
    CHECK(j.contains("model"));
    CHECK(j.contains("reply_text"));
    CHECK(j.contains("timestamp"));
  }
  CHECK(files == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("cache keys separate items and models") {
  CHECK(TranscriptCache::key("a", "m", "h") != TranscriptCache::key("b", "m", "h"));
  CHECK(TranscriptCache::key("a", "m", "h") != TranscriptCache::key("a", "n", "h"));
  CHECK(TranscriptCache::key("a", "m", "h") == TranscriptCache::key("a", "m", "h"));
  ChatRequest r1{"a", "prompt", "img", "image/png"};
  ChatRequest r2 = r1;
  r2.image_bytes = "img2";
  CHECK(request_hash(r1) != request_hash(r2));
}

TEST_CASE("corrupt cache entries are ignored") {
  const auto dir = temp_dir("corrupt");
  TranscriptCache cache(dir);
  const auto key = TranscriptCache::key("a", "m", "h");
  write_file_atomic(cache.path_for(key), "{broken");
  CHECK_FALSE(cache.load(key).has_value());
  cache.store(key, Transcript{"h", "m", "reply", "2026-01-01T00:00:00Z"});
  REQUIRE(cache.load(key).has_value());
  CHECK(cache.load(key)->reply_text == "reply");
  std::filesystem::remove_all(dir);
}

TEST_CASE("replay backend reads canned replies") {
  const auto dir = temp_dir("replay");
  write_file_atomic(dir / "item-1.txt", std::string(kGoodReply));
  ReplayBackend backend(dir, "canned");
  CHECK(backend.model_id() == "canned");
  CHECK(backend.send(ChatRequest{"item-1", "", "", "image/png"}) == kGoodReply);
  CHECK_THROWS_AS(backend.send(ChatRequest{"item-2", "", "", "image/png"}), Error);
  std::filesystem::remove_all(dir);
}

namespace {

struct LocalServer {
  httplib::Server server;
  int port = 0;
  std::thread thread;

  LocalServer() {
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~LocalServer() {
    server.stop();
    thread.join();
  }
  std::string base() const { return "http://127.0.0.1:" + std::to_string(port) + "/v1"; }
};

}  // namespace

TEST_CASE("HTTP backend speaks the chat-completions shape") {
  LocalServer local;
  nlohmann::json captured;
  std::string auth;
  local.server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    captured = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(R"J({"choices": [{"message": {"role": "assistant", "content": "hello there"}}]})J",
                    "application/json");
  });

  HttpBackendConfig config{local.base(), "vision-1", std::string("high"), 10s};
  HttpChatBackend backend(config, "secret-key");
  CHECK(backend.send(ChatRequest{"i", "describe", "PNG", "image/png"}) == "hello there");
  CHECK(auth == "Bearer secret-key");
  CHECK(captured["model"] == "vision-1");
  CHECK(captured["reasoning_effort"] == "high");
  const auto& content = captured["messages"][0]["content"];
  CHECK(content[0]["type"] == "text");
  CHECK(content[0]["text"] == "describe");
  CHECK(content[1]["image_url"]["url"] == "data:image/png;base64," + base64_encode("PNG"));

  const std::string body = backend.request_body(ChatRequest{"i", "describe", "PNG", "image/png"});
  CHECK(body.find("secret-key") == std::string::npos);
}

TEST_CASE("HTTP backend maps failures") {
  LocalServer local;
  std::atomic<int> mode{0};
  local.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    if (mode == 0) {
      res.status = 429;
      res.set_header("Retry-After", "7");
    } else if (mode == 1) {
      res.status = 500;
    } else {
      res.set_content(R"J({"choices": [{"message": {"content": [{"type": "text", "text": "a"}, {"type": "text", "text": "b"}]}}]})J",
                      "application/json");
    }
  });
  HttpChatBackend backend(HttpBackendConfig{local.base(), "m", std::nullopt, 10s}, "");
  try {
    backend.send(ChatRequest{"i", "p", "x", "image/png"});
    FAIL("expected RateLimited");
  } catch (const RateLimitedError& e) {
    CHECK(e.retry_after_seconds() == 7.0);
  }
  mode = 1;
  try {
    backend.send(ChatRequest{"i", "p", "x", "image/png"});
    FAIL("expected BackendUnavailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BackendUnavailable);
  }
  mode = 2;
  CHECK(backend.send(ChatRequest{"i", "p", "x", "image/png"}) == "ab");

  HttpChatBackend nowhere(HttpBackendConfig{"http://127.0.0.1:1", "m", std::nullopt, 2s}, "");
  CHECK_THROWS_AS(nowhere.send(ChatRequest{"i", "p", "x", "image/png"}), Error);
  HttpChatBackend unset(HttpBackendConfig{"", "m", std::nullopt, 2s}, "");
  CHECK_THROWS_AS(unset.send(ChatRequest{"i", "p", "x", "image/png"}), Error);
}
