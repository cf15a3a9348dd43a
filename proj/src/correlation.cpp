#include "kgeval/correlation.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>

#include "kgeval/error.hpp"

namespace kgeval {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) s.remove_suffix(1);
  return s;
}

std::optional<double> component_r(std::span<const double> x, std::span<const double> y) {
  try {
    return pearson(x, y);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ZeroVariance) return std::nullopt;
    throw;
  }
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "lengths differ: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
  if (x.size() < 2) throw Error(ErrorCode::LengthMismatch, "need at least two observations");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::ZeroVariance, "a series is constant");
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

std::map<std::string, double> parse_ratings_csv(std::string_view text) {
  std::map<std::string, std::pair<double, std::size_t>> acc;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (trim(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) {
      throw Error(ErrorCode::MalformedLine, "expected item_id,rating", line_no);
    }
    const auto id = trim(line.substr(0, comma));
    auto value = trim(line.substr(comma + 1));
    if (const auto extra = value.find(','); extra != std::string_view::npos) value = trim(value.substr(0, extra));
    if (line_no == 1 && id == "item_id") continue;
    double rating = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), rating);
    if (ec != std::errc{} || ptr != value.data() + value.size() || id.empty()) {
      throw Error(ErrorCode::MalformedLine, "cannot parse '" + std::string(line) + "'", line_no);
    }
    if (!(rating >= 0.0 && rating <= 10.0)) {
      throw Error(ErrorCode::InvalidRating, "rating outside [0, 10]: " + std::string(value), line_no);
    }
    auto& [sum, count] = acc[std::string(id)];
    sum += rating;
    ++count;
  }
  std::map<std::string, double> out;
  for (const auto& [id, sc] : acc) out.emplace(id, sc.first / static_cast<double>(sc.second));
  return out;
}

CorrelationReport correlate_with_humans(const std::vector<ItemResult>& results,
                                        const std::map<std::string, double>& ratings) {
  std::vector<double> human, mmmg, fidelity, read;
  for (const auto& r : results) {
    auto it = ratings.find(r.item_id);
    if (it == ratings.end()) continue;
    human.push_back(it->second);
    mmmg.push_back(r.mmmg_score);
    fidelity.push_back(r.fidelity.one_minus_ged);
    read.push_back(r.readability.score);
  }
  if (human.empty()) throw Error(ErrorCode::NoOverlap, "no result item has a rating");
  CorrelationReport report;
  report.joined_items = human.size();
  report.mmmg_r = pearson(mmmg, human);
  report.fidelity_r = component_r(fidelity, human);
  report.readability_r = component_r(read, human);
  return report;
}

std::string correlation_to_json(const CorrelationReport& report) {
  nlohmann::ordered_json j;
  j["joined_items"] = report.joined_items;
  j["mmmg_r"] = report.mmmg_r;
  j["fidelity_r"] = report.fidelity_r ? nlohmann::ordered_json(*report.fidelity_r) : nlohmann::ordered_json();
  j["readability_r"] =
      report.readability_r ? nlohmann::ordered_json(*report.readability_r) : nlohmann::ordered_json();
  return j.dump(2) + "\n";
}

}  // namespace kgeval
