#include "kgeval/readability.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <tuple>

#include "kgeval/error.hpp"

namespace kgeval {

namespace {

using ordered_json = nlohmann::ordered_json;

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> rank_;
};

std::int64_t intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const std::int64_t ix = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  const std::int64_t iy = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  if (ix <= 0 || iy <= 0) return 0;
  return ix * iy;
}

template <typename T>
T get_number(const ordered_json& obj, const char* field, const char* where) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_number()) {
    throw Error(ErrorCode::MalformedJson, std::string(where) + " needs numeric \"" + field + "\"");
  }
  return it->get<T>();
}

}  // namespace

ParsedRegions parse_regions_json(std::string_view bytes) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(bytes.begin(), bytes.end());
  } catch (const ordered_json::parse_error& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::MalformedJson, "regions document must be an object");

  ParsedRegions out;
  RegionSet& set = out.regions;

  auto image = doc.find("image");
  if (image == doc.end() || !image->is_object()) throw Error(ErrorCode::MalformedJson, "missing \"image\"");
  set.image_width = get_number<std::int64_t>(*image, "width", "image");
  set.image_height = get_number<std::int64_t>(*image, "height", "image");
  if (set.image_width <= 0 || set.image_height <= 0) {
    throw Error(ErrorCode::InvalidRegion, "image dimensions must be positive");
  }

  auto producer = doc.find("producer");
  if (producer == doc.end() || !producer->is_object()) {
    throw Error(ErrorCode::MalformedJson, "missing \"producer\" metadata");
  }
  if (auto m = producer->find("model"); m != producer->end() && m->is_string()) {
    set.producer.model = m->get<std::string>();
  } else {
    throw Error(ErrorCode::MalformedJson, "producer needs string \"model\"");
  }
  set.producer.points_per_side = get_number<int>(*producer, "points_per_side", "producer");
  set.producer.nms_iou = get_number<double>(*producer, "nms_iou", "producer");

  auto regions = doc.find("regions");
  if (regions == doc.end() || !regions->is_array()) {
    throw Error(ErrorCode::MalformedJson, "\"regions\" must be an array");
  }
  for (std::size_t i = 0; i < regions->size(); ++i) {
    const auto& r = (*regions)[i];
    if (!r.is_object()) throw Error(ErrorCode::MalformedJson, "region is not an object", i);
    Region region;

    auto kind = r.find("kind");
    if (kind == r.end() || !kind->is_string()) throw Error(ErrorCode::MalformedJson, "region needs \"kind\"", i);
    if (*kind == "mask") region.kind = RegionKind::Mask;
    else if (*kind == "text") region.kind = RegionKind::Text;
    else throw Error(ErrorCode::MalformedJson, "region kind must be \"mask\" or \"text\"", i);

    auto bbox = r.find("bbox");
    if (bbox == r.end() || !bbox->is_array() || bbox->size() != 4 ||
        !std::all_of(bbox->begin(), bbox->end(), [](const auto& v) { return v.is_number_integer(); })) {
      throw Error(ErrorCode::MalformedJson, "bbox must be four integers [x, y, w, h]", i);
    }
    region.bbox = {(*bbox)[0].get<std::int64_t>(), (*bbox)[1].get<std::int64_t>(),
                   (*bbox)[2].get<std::int64_t>(), (*bbox)[3].get<std::int64_t>()};
    const BoundingBox& b = region.bbox;
    if (b.w <= 0 || b.h <= 0) throw Error(ErrorCode::InvalidRegion, "bbox width and height must be positive", i);
    if (b.x < 0 || b.y < 0 || b.x + b.w > set.image_width || b.y + b.h > set.image_height) {
      throw Error(ErrorCode::InvalidRegion, "bbox lies outside the image", i);
    }

    if (auto area = r.find("area"); area != r.end() && !area->is_null()) {
      if (!area->is_number_integer()) throw Error(ErrorCode::MalformedJson, "area must be an integer", i);
      region.area = area->get<std::int64_t>();
      if (region.area <= 0 || region.area > b.area()) {
        throw Error(ErrorCode::InvalidRegion, "area must lie in (0, w*h]", i);
      }
    } else {
      region.area = b.area();
      out.warnings.push_back("region " + std::to_string(i) + " has no area; using bbox area");
    }

    if (auto score = r.find("score"); score != r.end() && !score->is_null()) {
      if (!score->is_number()) throw Error(ErrorCode::MalformedJson, "score must be a number", i);
      double s = score->get<double>();
      if (s < 0.0 || s > 1.0) throw Error(ErrorCode::InvalidRegion, "score must lie in [0, 1]", i);
      region.score = s;
    }
    set.regions.push_back(region);
  }
  return out;
}

std::string serialize_regions_json(const RegionSet& set) {
  ordered_json doc;
  doc["image"] = {{"width", set.image_width}, {"height", set.image_height}};
  doc["producer"] = {{"model", set.producer.model},
                     {"points_per_side", set.producer.points_per_side},
                     {"nms_iou", set.producer.nms_iou}};
  doc["regions"] = ordered_json::array();
  for (const auto& r : set.regions) {
    ordered_json j;
    j["kind"] = r.kind == RegionKind::Mask ? "mask" : "text";
    j["bbox"] = {r.bbox.x, r.bbox.y, r.bbox.w, r.bbox.h};
    j["area"] = r.area;
    if (r.score) j["score"] = *r.score;
    doc["regions"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

MergeResult merge_regions(const RegionSet& set, double overlap_threshold) {
  if (!(overlap_threshold >= 0.0 && overlap_threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidThresholds, "overlap threshold must lie in [0, 1]");
  }
  const auto& regions = set.regions;
  const std::size_t n = regions.size();
  DisjointSets sets(n);

  // Sweep along x: only boxes whose x-intervals intersect can overlap.
  std::vector<std::size_t> by_x(n);
  std::iota(by_x.begin(), by_x.end(), 0);
  std::sort(by_x.begin(), by_x.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(regions[a].bbox.x, a) < std::tie(regions[b].bbox.x, b);
  });
  for (std::size_t i = 0; i < n; ++i) {
    const Region& a = regions[by_x[i]];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Region& b = regions[by_x[j]];
      if (b.bbox.x >= a.bbox.x + a.bbox.w) break;
      const std::int64_t inter = intersection_area(a.bbox, b.bbox);
      if (inter == 0) continue;
      const double smaller = static_cast<double>(std::min(a.area, b.area));
      if (static_cast<double>(inter) / smaller >= overlap_threshold) sets.unite(by_x[i], by_x[j]);
    }
  }

  MergeResult out;
  out.group_of.resize(n);
  std::vector<std::size_t> id_of_root(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = sets.find(i);
    if (id_of_root[root] == n) id_of_root[root] = out.group_count++;
    out.group_of[i] = id_of_root[root];
  }
  return out;
}

double readability_score(std::int64_t n_vis, std::int64_t n_min, std::int64_t n_max) {
  if (n_min >= n_max) {
    throw Error(ErrorCode::InvalidThresholds,
                "n_min (" + std::to_string(n_min) + ") must be below n_max (" + std::to_string(n_max) + ")");
  }
  if (n_vis <= n_min) return 1.0;
  if (n_vis >= n_max) return 0.0;
  return static_cast<double>(n_max - n_vis) / static_cast<double>(n_max - n_min);
}

ReadabilityResult readability(const RegionSet& set, const ReadabilityConfig& config) {
  ReadabilityResult out;
  out.n_min = config.n_min;
  out.n_max = config.n_max;
  readability_score(0, config.n_min, config.n_max);
  out.n_vis = merge_regions(set, config.overlap_threshold).group_count;
  out.score = readability_score(static_cast<std::int64_t>(out.n_vis), config.n_min, config.n_max);
  return out;
}

}  // namespace kgeval
