#pragma once
// Aggregation and rendering of per-item results.
//
// Table cells are unweighted means of per-item scores, shown x100 with two
// decimals. "Avg" is the mean over all of a model's items unless
// AvgMode::LevelMean asks for the mean of the non-empty level cells.

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kgeval/error.hpp"
#include "kgeval/scoring.hpp"

namespace kgeval {

struct ItemFailure {
  std::string item_id;
  std::string model;
  ErrorCode code = ErrorCode::Io;
  std::string message;
};

struct CellStats {
  double sum = 0.0;
  std::size_t count = 0;

  void add(double v) { sum += v; ++count; }
  double mean() const { return count == 0 ? 0.0 : sum / static_cast<double>(count); }
};

enum class AvgMode { ItemMean, LevelMean };

struct ReportOptions {
  AvgMode avg_mode = AvgMode::ItemMean;
  std::size_t histogram_bin_width = 10;
  /// Region count at or above which an image is called fragmented in the summary.
  std::int64_t fragmentation_threshold = kDefaultNMin;
  bool ged_only = false;
};

struct ModelSummary {
  std::string model;
  std::array<CellStats, 6> by_level;
  std::array<CellStats, 10> by_discipline;
  CellStats overall;
  std::size_t low_score_items = 0;
  std::map<ErrorClass, std::size_t> error_counts;
  /// bin index -> count, bins of histogram_bin_width region groups.
  std::map<std::size_t, std::size_t> region_histogram;
  std::size_t images_with_regions = 0;
  std::size_t fragmented_images = 0;

  /// The "Avg" column under the given convention.
  double average(AvgMode mode) const;
};

struct Report {
  ReportOptions options;
  std::vector<ItemResult> results;
  std::vector<ItemFailure> failures;
  /// Sorted by model name.
  std::vector<ModelSummary> models;
  ModelSummary all;
};

Report build_report(std::vector<ItemResult> results, std::vector<ItemFailure> failures,
                    const ReportOptions& options = {});

std::string render_report_markdown(const Report& report);
/// "model,bin_start,bin_end,count" rows; bin_end is exclusive.
std::string render_histogram_csv(const Report& report);

std::string results_to_json(const std::vector<ItemResult>& results);
std::vector<ItemResult> results_from_json(std::string_view bytes);
std::string failures_to_json(const std::vector<ItemFailure>& failures);

}  // namespace kgeval
