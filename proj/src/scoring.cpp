#include "kgeval/scoring.hpp"

namespace kgeval {

std::string_view to_string(ErrorClass c) {
  switch (c) {
    case ErrorClass::VisualReadability: return "VisualReadability";
    case ErrorClass::EntityRepresentation: return "EntityRepresentation";
    case ErrorClass::DependencyStructure: return "DependencyStructure";
  }
  return "";
}

double mmmg_score(const FidelityScore& fidelity, const ReadabilityResult& readability) {
  return readability.score * fidelity.one_minus_ged;
}

std::set<ErrorClass> categorize_errors(const ItemResult& r, const ErrorThresholds& t) {
  std::set<ErrorClass> classes;
  if (r.mmmg_score > t.low_score_gate) return classes;
  if (r.readability.score <= t.readability) classes.insert(ErrorClass::VisualReadability);
  if (r.fidelity.entity_recall <= t.entity_recall) classes.insert(ErrorClass::EntityRepresentation);
  if (r.fidelity.dependency_accuracy <= t.dependency_accuracy) classes.insert(ErrorClass::DependencyStructure);
  return classes;
}

}  // namespace kgeval
