#include "kgeval/fidelity.hpp"

#include "kgeval/error.hpp"
#include "kgeval/kg_dsl.hpp"

namespace kgeval {

namespace {

bool endpoints_present(const Dependency& d, const GroundingVerdicts& v) {
  return v.entity_verdicts.at(d.left.entity) && v.entity_verdicts.at(d.right.entity);
}

}  // namespace

GroundedSubgraph subgraph_from_verdicts(const KnowledgeGraph& ref, const GroundingVerdicts& verdicts) {
  GroundingVerdicts v = complete_verdicts(ref, verdicts);
  GroundedSubgraph out;
  std::vector<EntityLabel> entities;
  for (const auto& e : ref.entities()) {
    if (v.entity_verdicts.at(e)) entities.push_back(e);
  }
  std::vector<Dependency> deps;
  for (const auto& d : ref.dependencies()) {
    if (!v.dependency_verdicts.at(d).present) continue;
    if (!endpoints_present(d, v)) {
      out.warnings.push_back("dropped " + serialize_dependency(d) +
                             ": judged present but an endpoint entity was judged absent");
      continue;
    }
    deps.push_back(d);
  }
  out.graph = validate_graph(std::move(entities), std::move(deps), Strictness::Strict);
  return out;
}

FidelityScore fidelity_from_verdicts(const KnowledgeGraph& ref, const GroundingVerdicts& verdicts,
                                     EndpointPolicy policy) {
  if (ref.empty()) throw Error(ErrorCode::EmptyReference, "reference graph has no items");
  GroundingVerdicts v = complete_verdicts(ref, verdicts);

  std::size_t found_entities = 0;
  for (const auto& e : ref.entities()) found_entities += v.entity_verdicts.at(e) ? 1 : 0;
  std::size_t found_deps = 0;
  for (const auto& d : ref.dependencies()) {
    bool present = v.dependency_verdicts.at(d).present;
    if (present && policy == EndpointPolicy::Drop) present = endpoints_present(d, v);
    found_deps += present ? 1 : 0;
  }

  const std::size_t n_entities = ref.entities().size();
  const std::size_t n_deps = ref.dependencies().size();
  const double total = static_cast<double>(n_entities + n_deps);

  FidelityScore s;
  s.missing_entities = n_entities - found_entities;
  s.missing_dependencies = n_deps - found_deps;
  const std::size_t missing = s.missing_entities + s.missing_dependencies;
  s.one_minus_ged = 1.0 - static_cast<double>(missing) / total;
  // (correct / total) written as 1 - incorrect / total so that both fields
  // agree bit for bit; the two forms can differ in the last ulp.
  const std::size_t correct = found_entities + found_deps;
  s.u_acc = 1.0 - static_cast<double>(n_entities + n_deps - correct) / total;
  s.entity_recall = n_entities == 0 ? 1.0 : static_cast<double>(found_entities) / n_entities;
  s.dependency_accuracy = n_deps == 0 ? 1.0 : static_cast<double>(found_deps) / n_deps;
  return s;
}

double normalized_ged(const KnowledgeGraph& gen, const KnowledgeGraph& ref, std::size_t node_cap) {
  if (ref.empty()) throw Error(ErrorCode::EmptyReference, "reference graph has no items");
  double d = exact_ged(gen, ref, EditCosts{}, node_cap) / static_cast<double>(ref.size());
  if (d < 0.0) return 0.0;
  if (d > 1.0) return 1.0;
  return d;
}

}  // namespace kgeval
