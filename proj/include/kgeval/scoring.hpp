#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kgeval/fidelity.hpp"
#include "kgeval/manifest.hpp"
#include "kgeval/readability.hpp"

namespace kgeval {

enum class ErrorClass { VisualReadability, EntityRepresentation, DependencyStructure };

std::string_view to_string(ErrorClass c);

/// Failure-analysis cut-offs; every comparison is inclusive (<=).
struct ErrorThresholds {
  double low_score_gate = 0.5;
  double readability = 0.5;
  double entity_recall = 0.3;
  double dependency_accuracy = 0.4;
};

struct Provenance {
  std::string backend_model;
  std::string region_producer;
};

struct ItemResult {
  std::string item_id;
  std::string model;
  EducationLevel education_level = EducationLevel::Preschool;
  Discipline discipline = Discipline::Biology;
  FidelityScore fidelity;
  ReadabilityResult readability;
  /// False only in fidelity-only runs that had no regions file.
  bool regions_available = true;
  double mmmg_score = 0.0;
  std::set<ErrorClass> error_classes;
  Provenance provenance;
  GroundingVerdicts verdicts;
  std::vector<std::string> warnings;
};

/// readability x (1 - GED).
double mmmg_score(const FidelityScore& fidelity, const ReadabilityResult& readability);

/// Classes are assigned independently, and only when mmmg_score <= the gate.
std::set<ErrorClass> categorize_errors(const ItemResult& result, const ErrorThresholds& thresholds = {});

}  // namespace kgeval
