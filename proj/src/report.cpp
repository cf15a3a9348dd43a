#include "kgeval/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>

#include "kgeval/kg_dsl.hpp"

namespace kgeval {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string x100(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v * 100.0);
  return buf;
}

std::string cell(const CellStats& c) { return c.count == 0 ? "-" : x100(c.mean()); }

void accumulate(ModelSummary& s, const ItemResult& r, const ReportOptions& options) {
  s.by_level[static_cast<std::size_t>(r.education_level)].add(r.mmmg_score);
  s.by_discipline[static_cast<std::size_t>(r.discipline)].add(r.mmmg_score);
  s.overall.add(r.mmmg_score);
  if (r.mmmg_score <= ErrorThresholds{}.low_score_gate) ++s.low_score_items;
  for (ErrorClass c : r.error_classes) ++s.error_counts[c];
  if (r.regions_available) {
    ++s.images_with_regions;
    ++s.region_histogram[r.readability.n_vis / std::max<std::size_t>(1, options.histogram_bin_width)];
    if (static_cast<std::int64_t>(r.readability.n_vis) >= options.fragmentation_threshold) ++s.fragmented_images;
  }
}

void level_table(std::string& out, const Report& report, bool with_all_row) {
  out += "| Model |";
  for (EducationLevel l : kAllLevels) out += " " + std::string(column_title(l)) + " |";
  out += " Avg |\n|---|";
  for (std::size_t i = 0; i < kAllLevels.size(); ++i) out += "---:|";
  out += "---:|\n";
  auto row = [&](const ModelSummary& s) {
    out += "| " + s.model + " |";
    for (const auto& c : s.by_level) out += " " + cell(c) + " |";
    out += " " + (s.overall.count == 0 ? std::string("-") : x100(s.average(report.options.avg_mode))) + " |\n";
  };
  for (const auto& s : report.models) row(s);
  if (with_all_row) row(report.all);
}

void discipline_table(std::string& out, const Report& report, bool with_all_row) {
  out += "| Model |";
  for (Discipline d : kAllDisciplines) out += " " + std::string(column_title(d)) + " |";
  out += " Avg |\n|---|";
  for (std::size_t i = 0; i < kAllDisciplines.size(); ++i) out += "---:|";
  out += "---:|\n";
  auto row = [&](const ModelSummary& s) {
    out += "| " + s.model + " |";
    for (const auto& c : s.by_discipline) out += " " + cell(c) + " |";
    out += " " + cell(s.overall) + " |\n";
  };
  for (const auto& s : report.models) row(s);
  if (with_all_row) row(report.all);
}

ordered_json fidelity_json(const FidelityScore& f) {
  return {{"one_minus_ged", f.one_minus_ged},
          {"u_acc", f.u_acc},
          {"entity_recall", f.entity_recall},
          {"dependency_accuracy", f.dependency_accuracy},
          {"missing_entities", f.missing_entities},
          {"missing_dependencies", f.missing_dependencies}};
}

}  // namespace

double ModelSummary::average(AvgMode mode) const {
  if (mode == AvgMode::ItemMean) return overall.mean();
  CellStats levels;
  for (const auto& c : by_level) {
    if (c.count > 0) levels.add(c.mean());
  }
  return levels.mean();
}

Report build_report(std::vector<ItemResult> results, std::vector<ItemFailure> failures,
                    const ReportOptions& options) {
  Report report;
  report.options = options;
  report.all.model = "All";
  std::map<std::string, ModelSummary> by_model;
  for (const auto& r : results) {
    auto& s = by_model[r.model];
    s.model = r.model;
    accumulate(s, r, options);
    accumulate(report.all, r, options);
  }
  for (auto& [_, s] : by_model) report.models.push_back(std::move(s));
  report.results = std::move(results);
  report.failures = std::move(failures);
  return report;
}

std::string render_report_markdown(const Report& report) {
  const bool with_all_row = report.models.size() > 1;
  std::string out = "# MMMG-Score report\n\n";
  if (report.options.ged_only) out += "Mode: knowledge fidelity only (readability fixed at 1).\n\n";
  out += "Items scored: " + std::to_string(report.results.size()) +
         ", failed: " + std::to_string(report.failures.size()) + "\n\n";
  out += "Scores are x100. Avg is the ";
  out += report.options.avg_mode == AvgMode::ItemMean ? "mean over items" : "mean of the level columns";
  out += ".\n\n## By education level\n\n";
  level_table(out, report, with_all_row);
  out += "\n## By discipline\n\n";
  discipline_table(out, report, with_all_row);

  out += "\n## Error analysis\n\nItems with MMMG-Score <= 0.50, classified independently.\n\n";
  out += "| Model | Low-score items | VisualReadability | EntityRepresentation | DependencyStructure |\n";
  out += "|---|---:|---:|---:|---:|\n";
  auto error_row = [&](const ModelSummary& s) {
    auto count = [&](ErrorClass c) {
      auto it = s.error_counts.find(c);
      return std::to_string(it == s.error_counts.end() ? 0 : it->second);
    };
    out += "| " + s.model + " | " + std::to_string(s.low_score_items) + " | " +
           count(ErrorClass::VisualReadability) + " | " + count(ErrorClass::EntityRepresentation) + " | " +
           count(ErrorClass::DependencyStructure) + " |\n";
  };
  for (const auto& s : report.models) error_row(s);
  if (with_all_row) error_row(report.all);

  out += "\n## Region counts\n\n";
  out += "| Model | Images | n_vis >= " + std::to_string(report.options.fragmentation_threshold) + " | Share |\n";
  out += "|---|---:|---:|---:|\n";
  auto region_row = [&](const ModelSummary& s) {
    const double share = s.images_with_regions == 0
                             ? 0.0
                             : static_cast<double>(s.fragmented_images) / static_cast<double>(s.images_with_regions);
    out += "| " + s.model + " | " + std::to_string(s.images_with_regions) + " | " +
           std::to_string(s.fragmented_images) + " | " + x100(share) + "% |\n";
  };
  for (const auto& s : report.models) region_row(s);
  if (with_all_row) region_row(report.all);

  if (!report.failures.empty()) {
    out += "\n## Failures\n\n";
    for (const auto& f : report.failures) {
      out += "- " + f.item_id + " (" + f.model + "): " + std::string(to_string(f.code)) + ": " + f.message + "\n";
    }
  }
  return out;
}

std::string render_histogram_csv(const Report& report) {
  const std::size_t width = std::max<std::size_t>(1, report.options.histogram_bin_width);
  std::string out = "model,bin_start,bin_end,count\n";
  for (const auto& s : report.models) {
    if (s.region_histogram.empty()) continue;
    const std::size_t last = s.region_histogram.rbegin()->first;
    for (std::size_t bin = 0; bin <= last; ++bin) {
      auto it = s.region_histogram.find(bin);
      out += s.model + "," + std::to_string(bin * width) + "," + std::to_string((bin + 1) * width) + "," +
             std::to_string(it == s.region_histogram.end() ? 0 : it->second) + "\n";
    }
  }
  return out;
}

std::string results_to_json(const std::vector<ItemResult>& results) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : results) {
    ordered_json j;
    j["item_id"] = r.item_id;
    j["model"] = r.model;
    j["education_level"] = to_string(r.education_level);
    j["discipline"] = to_string(r.discipline);
    j["mmmg_score"] = r.mmmg_score;
    j["fidelity"] = fidelity_json(r.fidelity);
    j["readability"] = {{"n_vis", r.readability.n_vis},
                        {"score", r.readability.score},
                        {"n_min", r.readability.n_min},
                        {"n_max", r.readability.n_max},
                        {"regions_available", r.regions_available}};
    j["error_classes"] = ordered_json::array();
    for (ErrorClass c : r.error_classes) j["error_classes"].push_back(to_string(c));
    j["provenance"] = {{"backend_model", r.provenance.backend_model},
                       {"region_producer", r.provenance.region_producer}};
    j["entity_verdicts"] = ordered_json::array();
    for (const auto& [e, present] : r.verdicts.entity_verdicts) {
      j["entity_verdicts"].push_back({{"entity", e.display()}, {"present", present}});
    }
    j["dependency_verdicts"] = ordered_json::array();
    for (const auto& [d, v] : r.verdicts.dependency_verdicts) {
      j["dependency_verdicts"].push_back(
          {{"dependency", serialize_dependency(d)}, {"present", v.present}, {"reason", v.reason}});
    }
    j["warnings"] = r.warnings;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<ItemResult> results_from_json(std::string_view bytes) {
  ordered_json arr;
  try {
    arr = ordered_json::parse(bytes.begin(), bytes.end());
  } catch (const ordered_json::parse_error& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
  if (!arr.is_array()) throw Error(ErrorCode::MalformedJson, "results must be a JSON array");

  std::vector<ItemResult> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& j = arr[i];
    try {
      ItemResult r;
      r.item_id = j.at("item_id").get<std::string>();
      r.model = j.value("model", "unknown");
      auto level = education_level_from_string(j.at("education_level").get<std::string>());
      if (!level) throw Error(ErrorCode::InvalidLevel, "bad education_level", i);
      r.education_level = *level;
      auto discipline = discipline_from_string(j.at("discipline").get<std::string>());
      if (!discipline) throw Error(ErrorCode::InvalidDiscipline, "bad discipline", i);
      r.discipline = *discipline;
      r.mmmg_score = j.at("mmmg_score").get<double>();

      const auto& f = j.at("fidelity");
      r.fidelity.one_minus_ged = f.at("one_minus_ged").get<double>();
      r.fidelity.u_acc = f.at("u_acc").get<double>();
      r.fidelity.entity_recall = f.at("entity_recall").get<double>();
      r.fidelity.dependency_accuracy = f.at("dependency_accuracy").get<double>();
      r.fidelity.missing_entities = f.value("missing_entities", std::size_t{0});
      r.fidelity.missing_dependencies = f.value("missing_dependencies", std::size_t{0});

      const auto& rd = j.at("readability");
      r.readability.n_vis = rd.at("n_vis").get<std::size_t>();
      r.readability.score = rd.at("score").get<double>();
      r.readability.n_min = rd.value("n_min", std::int64_t{kDefaultNMin});
      r.readability.n_max = rd.value("n_max", std::int64_t{kDefaultNMax});
      r.regions_available = rd.value("regions_available", true);

      for (const auto& c : j.value("error_classes", ordered_json::array())) {
        const auto name = c.get<std::string>();
        for (ErrorClass ec : {ErrorClass::VisualReadability, ErrorClass::EntityRepresentation,
                              ErrorClass::DependencyStructure}) {
          if (name == to_string(ec)) r.error_classes.insert(ec);
        }
      }
      if (auto p = j.find("provenance"); p != j.end()) {
        r.provenance.backend_model = p->value("backend_model", "");
        r.provenance.region_producer = p->value("region_producer", "");
      }
      for (const auto& ev : j.value("entity_verdicts", ordered_json::array())) {
        r.verdicts.entity_verdicts.emplace(EntityLabel(ev.at("entity").get<std::string>()),
                                           ev.at("present").get<bool>());
      }
      for (const auto& dv : j.value("dependency_verdicts", ordered_json::array())) {
        r.verdicts.dependency_verdicts.emplace(
            parse_dependency(dv.at("dependency").get<std::string>()),
            DependencyVerdict{dv.at("present").get<bool>(), dv.value("reason", "")});
      }
      r.warnings = j.value("warnings", std::vector<std::string>{});
      out.push_back(std::move(r));
    } catch (const ordered_json::exception& e) {
      throw Error(ErrorCode::MalformedJson, e.what(), i);
    }
  }
  return out;
}

std::string failures_to_json(const std::vector<ItemFailure>& failures) {
  ordered_json arr = ordered_json::array();
  for (const auto& f : failures) {
    arr.push_back({{"item_id", f.item_id}, {"model", f.model}, {"code", to_string(f.code)}, {"message", f.message}});
  }
  return arr.dump(2) + "\n";
}

}  // namespace kgeval
