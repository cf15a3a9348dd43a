#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "kgeval/batch.hpp"
#include "kgeval/chat_backend.hpp"
#include "kgeval/correlation.hpp"
#include "kgeval/error.hpp"
#include "kgeval/fidelity.hpp"
#include "kgeval/io.hpp"
#include "kgeval/kg_dsl.hpp"
#include "kgeval/manifest.hpp"
#include "kgeval/readability.hpp"
#include "kgeval/report.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

struct Options {
  std::int64_t n_min = kgeval::kDefaultNMin;
  std::int64_t n_max = kgeval::kDefaultNMax;
  double overlap_threshold = kgeval::kDefaultOverlapThreshold;
  std::string backend_model;
  std::optional<std::string> reasoning_effort;
  std::size_t max_inflight = 8;
  std::optional<std::string> cache_dir;
  bool ged_only = false;
  bool lenient = false;
  std::optional<std::string> replay_dir;
  std::optional<std::string> sidecar_cmd;
  std::string avg_mode = "item";
  std::optional<std::string> out_dir;
  int max_retries = 2;
};

kgeval::Strictness strictness(const Options& o) {
  return o.lenient ? kgeval::Strictness::Lenient : kgeval::Strictness::Strict;
}

kgeval::KnowledgeGraph load_kg(const std::string& path, const Options& o) {
  return kgeval::parse_kg_json(kgeval::read_file(path), strictness(o));
}

kgeval::ReadabilityConfig readability_config(const Options& o) {
  return {o.overlap_threshold, o.n_min, o.n_max};
}

std::unique_ptr<kgeval::ChatBackend> make_backend(const Options& o) {
  if (o.replay_dir) {
    return std::make_unique<kgeval::ReplayBackend>(*o.replay_dir,
                                                   o.backend_model.empty() ? "replay" : o.backend_model);
  }
  if (o.backend_model.empty()) {
    throw kgeval::Error(kgeval::ErrorCode::BackendUnavailable, "--backend-model or --replay-dir is required");
  }
  return std::make_unique<kgeval::HttpChatBackend>(
      kgeval::HttpBackendConfig::from_environment(o.backend_model, o.reasoning_effort));
}

kgeval::EvalConfig eval_config(const Options& o) {
  kgeval::EvalConfig config;
  config.readability = readability_config(o);
  config.ged_only = o.ged_only;
  config.max_inflight = o.max_inflight;
  if (o.cache_dir) config.cache_dir = fs::path(*o.cache_dir);
  config.retry.max_retries = o.max_retries;
  config.sidecar_command = o.sidecar_cmd;
  return config;
}

kgeval::ReportOptions report_options(const Options& o) {
  kgeval::ReportOptions options;
  options.avg_mode = o.avg_mode == "level" ? kgeval::AvgMode::LevelMean : kgeval::AvgMode::ItemMean;
  options.ged_only = o.ged_only;
  return options;
}

void write_outputs(const kgeval::Report& report, const fs::path& dir) {
  kgeval::write_file_atomic(dir / "results.json", kgeval::results_to_json(report.results));
  kgeval::write_file_atomic(dir / "failures.json", kgeval::failures_to_json(report.failures));
  kgeval::write_file_atomic(dir / "report.md", kgeval::render_report_markdown(report));
  kgeval::write_file_atomic(dir / "histogram.csv", kgeval::render_histogram_csv(report));
}

int cmd_parse_kg(const std::string& path, const Options& o) {
  const auto kg = load_kg(path, o);
  for (const auto& w : kg.warnings()) std::cerr << "warning: " << w << "\n";
  std::cerr << kg.entities().size() << " entities, " << kg.dependencies().size() << " dependencies\n";
  std::cout << kgeval::serialize_kg_json(kg);
  return 0;
}

int cmd_ged(const std::string& ref_path, const std::string& gen_path, const Options& o) {
  const auto ref = load_kg(ref_path, o);
  const auto gen = load_kg(gen_path, o);
  const double ged = kgeval::exact_ged(gen, ref);
  const double normalized = kgeval::normalized_ged(gen, ref);
  ordered_json j{{"ged", ged}, {"reference_size", ref.size()}, {"normalized_ged", normalized},
                 {"one_minus_ged", 1.0 - normalized}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_readability(const std::string& path, const Options& o) {
  const auto parsed = kgeval::parse_regions_json(kgeval::read_file(path));
  for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << "\n";
  const auto r = kgeval::readability(parsed.regions, readability_config(o));
  ordered_json j{{"regions", parsed.regions.regions.size()}, {"n_vis", r.n_vis}, {"score", r.score},
                 {"n_min", r.n_min}, {"n_max", r.n_max}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_score(const std::string& path, const Options& o) {
  kgeval::ManifestOptions mo;
  mo.kg_strictness = strictness(o);
  mo.base_dir = fs::absolute(path).parent_path();
  const auto item = kgeval::parse_manifest_item(kgeval::read_file(path), mo);
  auto backend = make_backend(o);
  const auto config = eval_config(o);
  std::unique_ptr<kgeval::TranscriptCache> cache;
  if (config.cache_dir) cache = std::make_unique<kgeval::TranscriptCache>(*config.cache_dir);
  const auto result = kgeval::evaluate_item(item, *backend, config, cache.get());
  std::cout << kgeval::results_to_json({result});
  return 0;
}

int cmd_eval(const std::string& path, const Options& o) {
  kgeval::ManifestOptions mo;
  mo.mode = kgeval::ManifestMode::Partial;
  mo.kg_strictness = strictness(o);
  const auto manifest = kgeval::load_manifest(path, mo);
  for (const auto& e : manifest.errors) {
    std::cerr << path << ":" << e.line << ": " << kgeval::to_string(e.code) << ": " << e.message << "\n";
  }
  auto backend = make_backend(o);
  const auto report = kgeval::evaluate_batch(manifest.items, *backend, eval_config(o), report_options(o));
  const fs::path out = o.out_dir ? fs::path(*o.out_dir) : fs::path("kgeval-out");
  write_outputs(report, out);
  std::cerr << report.results.size() << " scored, " << report.failures.size() << " failed, "
            << manifest.errors.size() << " manifest lines rejected; outputs in " << out.string() << "\n";
  return report.results.empty() ? 1 : 0;
}

int cmd_correlate(const std::string& results_path, const std::string& ratings_path) {
  const auto results = kgeval::results_from_json(kgeval::read_file(results_path));
  const auto ratings = kgeval::parse_ratings_csv(kgeval::read_file(ratings_path));
  std::cout << kgeval::correlation_to_json(kgeval::correlate_with_humans(results, ratings));
  return 0;
}

int cmd_report(const std::string& results_path, const Options& o) {
  auto results = kgeval::results_from_json(kgeval::read_file(results_path));
  const auto report = kgeval::build_report(std::move(results), {}, report_options(o));
  if (o.out_dir) {
    const fs::path dir(*o.out_dir);
    kgeval::write_file_atomic(dir / "report.md", kgeval::render_report_markdown(report));
    kgeval::write_file_atomic(dir / "histogram.csv", kgeval::render_histogram_csv(report));
  } else {
    std::cout << kgeval::render_report_markdown(report);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-image evaluation: graph fidelity, readability and MMMG-Score"};
  app.require_subcommand(1);
  Options o;

  auto add_readability_flags = [&](CLI::App* sub) {
    sub->add_option("--n-min", o.n_min, "Region count at or below which readability is 1");
    sub->add_option("--n-max", o.n_max, "Region count at or above which readability is 0");
    sub->add_option("--overlap-threshold", o.overlap_threshold, "Overlap ratio that merges two regions")
        ->check(CLI::Range(0.0, 1.0));
  };
  auto add_strictness_flags = [&](CLI::App* sub) {
    auto* strict = sub->add_flag("--strict", "Reject dangling references and duplicates (default)");
    sub->add_flag("--lenient", o.lenient, "Auto-add dangling entities and drop duplicates")->excludes(strict);
  };
  auto add_eval_flags = [&](CLI::App* sub) {
    add_readability_flags(sub);
    add_strictness_flags(sub);
    sub->add_option("--backend-model", o.backend_model, "Vision chat model used for grounding");
    sub->add_option("--reasoning-effort", o.reasoning_effort, "Passed through to the chat endpoint");
    sub->add_option("--replay-dir", o.replay_dir, "Answer from <dir>/<item_id>.txt instead of the network");
    sub->add_option("--cache-dir", o.cache_dir, "Transcript cache directory");
    sub->add_option("--max-retries", o.max_retries, "Extra attempts per item")->check(CLI::NonNegativeNumber);
    sub->add_flag("--ged-only", o.ged_only, "Knowledge fidelity only; readability fixed at 1");
    sub->add_option("--sidecar-cmd", o.sidecar_cmd, "Region extractor run when a regions file is missing");
  };

  std::string arg1, arg2;
  auto* parse_kg = app.add_subcommand("parse-kg", "Validate a knowledge-graph JSON file and print it canonically");
  parse_kg->add_option("file", arg1)->required()->check(CLI::ExistingFile);
  add_strictness_flags(parse_kg);

  auto* ged = app.add_subcommand("ged", "Exact graph edit distance between two knowledge graphs");
  ged->add_option("ref", arg1)->required()->check(CLI::ExistingFile);
  ged->add_option("gen", arg2)->required()->check(CLI::ExistingFile);
  add_strictness_flags(ged);

  auto* read = app.add_subcommand("readability", "Merge regions and score readability");
  read->add_option("regions", arg1)->required()->check(CLI::ExistingFile);
  add_readability_flags(read);

  auto* score = app.add_subcommand("score", "Evaluate one manifest item given as a JSON file");
  score->add_option("item", arg1)->required()->check(CLI::ExistingFile);
  add_eval_flags(score);

  auto* eval = app.add_subcommand("eval", "Evaluate every item of an NDJSON manifest");
  eval->add_option("manifest", arg1)->required()->check(CLI::ExistingFile);
  add_eval_flags(eval);
  eval->add_option("--max-inflight", o.max_inflight, "Items evaluated concurrently")->check(CLI::PositiveNumber);
  eval->add_option("--out-dir", o.out_dir, "Output directory (default kgeval-out)");
  eval->add_option("--avg-mode", o.avg_mode, "Avg column: item mean or level mean")
      ->check(CLI::IsMember({"item", "level"}));

  auto* correlate = app.add_subcommand("correlate", "Pearson correlation of scores with human ratings");
  correlate->add_option("results", arg1)->required()->check(CLI::ExistingFile);
  correlate->add_option("ratings", arg2)->required()->check(CLI::ExistingFile);

  auto* report = app.add_subcommand("report", "Rebuild report tables from results.json");
  report->add_option("results", arg1)->required()->check(CLI::ExistingFile);
  report->add_option("--out-dir", o.out_dir, "Write report.md and histogram.csv here instead of stdout");
  report->add_option("--avg-mode", o.avg_mode, "Avg column: item mean or level mean")
      ->check(CLI::IsMember({"item", "level"}));
  report->add_flag("--ged-only", o.ged_only, "Label the report as fidelity-only");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*parse_kg) return cmd_parse_kg(arg1, o);
    if (*ged) return cmd_ged(arg1, arg2, o);
    if (*read) return cmd_readability(arg1, o);
    if (*score) return cmd_score(arg1, o);
    if (*eval) return cmd_eval(arg1, o);
    if (*correlate) return cmd_correlate(arg1, arg2);
    if (*report) return cmd_report(arg1, o);
  } catch (const kgeval::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
