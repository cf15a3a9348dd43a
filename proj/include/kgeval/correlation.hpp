#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgeval/scoring.hpp"

namespace kgeval {

/// Sample Pearson correlation. Throws LengthMismatch or ZeroVariance.
double pearson(std::span<const double> x, std::span<const double> y);

/// item_id -> mean rating. Header row optional. Throws MalformedLine or InvalidRating.
std::map<std::string, double> parse_ratings_csv(std::string_view text);

struct CorrelationReport {
  std::size_t joined_items = 0;
  double mmmg_r = 0.0;
  /// Empty when the component has zero variance over the joined items.
  std::optional<double> fidelity_r;
  std::optional<double> readability_r;
};

/// Joins on item_id. Throws NoOverlap, or ZeroVariance for the main score.
CorrelationReport correlate_with_humans(const std::vector<ItemResult>& results,
                                        const std::map<std::string, double>& ratings);

std::string correlation_to_json(const CorrelationReport& report);

}  // namespace kgeval
