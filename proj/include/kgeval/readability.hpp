#pragma once
// Visual readability from segmentation masks and OCR text boxes.
//
// Regions whose bounding boxes overlap enough are merged into one group; the
// group count n_vis is mapped to [0, 1] by a piecewise-linear ramp that is 1 up
// to n_min and 0 from n_max on.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kgeval {

enum class RegionKind { Mask, Text };

struct BoundingBox {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t w = 0;
  std::int64_t h = 0;

  std::int64_t area() const noexcept { return w * h; }
};

struct Region {
  RegionKind kind = RegionKind::Mask;
  BoundingBox bbox;
  /// Mask pixel count for masks, box area for text (and when the producer omitted it).
  std::int64_t area = 0;
  std::optional<double> score;
};

struct RegionProducer {
  std::string model;
  int points_per_side = 0;
  double nms_iou = 0.0;
};

struct RegionSet {
  std::int64_t image_width = 0;
  std::int64_t image_height = 0;
  RegionProducer producer;
  std::vector<Region> regions;
};

struct ParsedRegions {
  RegionSet regions;
  std::vector<std::string> warnings;
};

/// Reads the regions JSON written by the vision sidecar:
///   {"image": {"width", "height"}, "producer": {"model", "points_per_side", "nms_iou"},
///    "regions": [{"kind": "mask"|"text", "bbox": [x, y, w, h], "area": int, "score": float?}]}
/// Throws MalformedJson for shape errors and InvalidRegion for geometry that
/// breaks w > 0, h > 0, 0 < area <= w*h, bbox inside the image or score in [0, 1].
/// A missing "area" falls back to the box area with a warning.
ParsedRegions parse_regions_json(std::string_view bytes);

std::string serialize_regions_json(const RegionSet& set);

struct MergeResult {
  std::size_t group_count = 0;
  /// Group id per input region; ids are numbered by first appearance.
  std::vector<std::size_t> group_of;
};

/// Two regions share a group when their boxes intersect and
/// intersection / min(area_a, area_b) >= overlap_threshold; groups are the
/// transitive closure of that relation. Throws InvalidThresholds unless
/// 0 <= overlap_threshold <= 1.
MergeResult merge_regions(const RegionSet& set, double overlap_threshold);

inline constexpr int kDefaultNMin = 70;
inline constexpr int kDefaultNMax = 160;
inline constexpr double kDefaultOverlapThreshold = 0.5;

/// 1 for n_vis <= n_min, 0 for n_vis >= n_max, (n_max - n_vis) / (n_max - n_min)
/// between. Throws InvalidThresholds when n_min >= n_max.
double readability_score(std::int64_t n_vis, std::int64_t n_min = kDefaultNMin,
                         std::int64_t n_max = kDefaultNMax);

struct ReadabilityConfig {
  double overlap_threshold = kDefaultOverlapThreshold;
  std::int64_t n_min = kDefaultNMin;
  std::int64_t n_max = kDefaultNMax;
};

struct ReadabilityResult {
  std::size_t n_vis = 0;
  double score = 0.0;
  std::int64_t n_min = kDefaultNMin;
  std::int64_t n_max = kDefaultNMax;
};

ReadabilityResult readability(const RegionSet& set, const ReadabilityConfig& config = {});

}  // namespace kgeval
