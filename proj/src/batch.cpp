#include "kgeval/batch.hpp"

#include <atomic>
#include <cstdlib>
#include <memory>
#include <thread>
#include <variant>

#include "kgeval/error.hpp"
#include "kgeval/io.hpp"

namespace kgeval {

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out.push_back(c);
  }
  out += "'";
  return out;
}

void run_sidecar(const std::string& command, const ManifestItem& item) {
  const std::string line = command + " emit --image " + shell_quote(item.generated_image_path.string()) +
                           " --out " + shell_quote(item.regions_path.string());
  const int status = std::system(line.c_str());
  if (status != 0) {
    throw Error(ErrorCode::MissingRegions, "sidecar exited with status " + std::to_string(status));
  }
}

ItemResult evaluate_item_unwrapped(const ManifestItem& item, ChatBackend& backend, const EvalConfig& config,
                                   TranscriptCache* cache) {
  if (!std::filesystem::exists(item.generated_image_path)) {
    throw Error(ErrorCode::MissingImage, "no image at " + item.generated_image_path.string());
  }

  ItemResult r;
  r.item_id = item.id;
  r.model = item.model;
  r.education_level = item.education_level;
  r.discipline = item.discipline;
  r.warnings = item.kg.warnings();

  ImageAttachment image{read_file(item.generated_image_path), media_type_for(item.generated_image_path)};
  GroundingOptions grounding;
  grounding.item_id = item.id;
  grounding.retry = config.retry;
  grounding.cache = cache;
  grounding.sleep = config.sleep;
  GroundingOutcome outcome = ground_image(image, item.kg, backend, grounding);
  r.provenance.backend_model = backend.model_id();
  r.verdicts = std::move(outcome.parsed.verdicts);
  for (const auto& extra : outcome.parsed.extras) {
    r.warnings.push_back("reply judged an item outside the reference: " + extra);
  }
  for (auto& w : subgraph_from_verdicts(item.kg, r.verdicts).warnings) r.warnings.push_back(std::move(w));
  r.fidelity = fidelity_from_verdicts(item.kg, r.verdicts, config.endpoint_policy);

  if (!std::filesystem::exists(item.regions_path) && config.sidecar_command) {
    run_sidecar(*config.sidecar_command, item);
  }
  if (std::filesystem::exists(item.regions_path)) {
    ParsedRegions regions = parse_regions_json(read_file(item.regions_path));
    for (auto& w : regions.warnings) r.warnings.push_back(std::move(w));
    r.provenance.region_producer = regions.regions.producer.model;
    r.readability = readability(regions.regions, config.readability);
  } else if (config.ged_only) {
    r.regions_available = false;
    r.readability.n_min = config.readability.n_min;
    r.readability.n_max = config.readability.n_max;
  } else {
    throw Error(ErrorCode::MissingRegions, "no regions file at " + item.regions_path.string());
  }
  if (config.ged_only) r.readability.score = 1.0;

  r.mmmg_score = mmmg_score(r.fidelity, r.readability);
  r.error_classes = categorize_errors(r, config.thresholds);
  return r;
}

}  // namespace

ItemResult evaluate_item(const ManifestItem& item, ChatBackend& backend, const EvalConfig& config,
                         TranscriptCache* cache) {
  try {
    return evaluate_item_unwrapped(item, backend, config, cache);
  } catch (const RateLimitedError& e) {
    throw RateLimitedError("item " + item.id + ": " + e.detail(), e.retry_after_seconds());
  } catch (const Error& e) {
    throw Error(e.code(), "item " + item.id + ": " + e.detail(), e.position());
  }
}

Report evaluate_batch(const std::vector<ManifestItem>& items, ChatBackend& backend, const EvalConfig& config,
                      const ReportOptions& report_options) {
  if (items.empty()) throw Error(ErrorCode::EmptyManifest, "manifest has no items");

  std::unique_ptr<TranscriptCache> cache;
  if (config.cache_dir) cache = std::make_unique<TranscriptCache>(*config.cache_dir);

  std::vector<std::variant<std::monostate, ItemResult, ItemFailure>> slots(items.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      try {
        slots[i] = evaluate_item(items[i], backend, config, cache.get());
      } catch (const Error& e) {
        slots[i] = ItemFailure{items[i].id, items[i].model, e.code(), e.detail()};
      } catch (const std::exception& e) {
        slots[i] = ItemFailure{items[i].id, items[i].model, ErrorCode::Io, e.what()};
      }
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(config.max_inflight, items.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  std::vector<ItemResult> results;
  std::vector<ItemFailure> failures;
  for (auto& slot : slots) {
    if (auto* r = std::get_if<ItemResult>(&slot)) results.push_back(std::move(*r));
    else if (auto* f = std::get_if<ItemFailure>(&slot)) failures.push_back(std::move(*f));
  }
  ReportOptions options = report_options;
  options.ged_only = config.ged_only;
  return build_report(std::move(results), std::move(failures), options);
}

}  // namespace kgeval
