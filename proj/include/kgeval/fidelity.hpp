#pragma once
// Knowledge fidelity: how much of a reference graph survives grounding.
//
// Two routes compute the same quantity for verdict-derived subgraphs:
//   * the fast path counts false verdicts (fidelity_from_verdicts), and
//   * the exact path searches for a minimum-cost edit script (exact_ged)
//     between the grounded subgraph and the reference.
// Both normalize by |entities| + |dependencies| of the reference.

#include <cstddef>
#include <string>
#include <vector>

#include "kgeval/kg_model.hpp"

namespace kgeval {

struct FidelityScore {
  double one_minus_ged = 0.0;
  double u_acc = 0.0;
  double entity_recall = 0.0;
  double dependency_accuracy = 0.0;
  std::size_t missing_entities = 0;
  std::size_t missing_dependencies = 0;
};

/// How a dependency judged present is treated when one of its endpoint
/// entities was judged absent.
enum class EndpointPolicy {
  /// Drop it from the grounded subgraph (with a warning) and count it missing.
  Drop,
  /// Count the dependency verdict on its own. The grounded subgraph still
  /// drops it, so the exact-GED route only agrees with the fast path under Drop.
  Independent,
};

struct GroundedSubgraph {
  KnowledgeGraph graph;
  std::vector<std::string> warnings;
};

/// Verdicts are completed against `ref` first (missing items default to false);
/// throws VerdictKeyMismatch when they name items outside `ref`.
GroundedSubgraph subgraph_from_verdicts(const KnowledgeGraph& ref, const GroundingVerdicts& verdicts);

/// Throws EmptyReference for an empty reference graph.
FidelityScore fidelity_from_verdicts(const KnowledgeGraph& ref, const GroundingVerdicts& verdicts,
                                     EndpointPolicy policy = EndpointPolicy::Drop);

struct EditCosts {
  double node_insert = 1.0;
  double node_delete = 1.0;
  double node_substitute = 1.0;
  double edge_insert = 1.0;
  double edge_delete = 1.0;
  double edge_substitute = 1.0;
};

inline constexpr std::size_t kDefaultGedNodeCap = 16;

/// Minimum edit cost turning g1 into g2. Nodes are entities (matched for free
/// only on equal normalized labels); edges are directed and labeled by
/// (predicate kind, left modifier, right modifier), so parallel edges are
/// allowed. Exact branch-and-bound; throws SizeCapExceeded when the two graphs
/// together hold more than `node_cap` entities.
double exact_ged(const KnowledgeGraph& g1, const KnowledgeGraph& g2, const EditCosts& costs = {},
                 std::size_t node_cap = kDefaultGedNodeCap);

/// exact_ged(gen, ref) with unit costs over |ref| size, clamped to [0, 1].
double normalized_ged(const KnowledgeGraph& gen, const KnowledgeGraph& ref,
                      std::size_t node_cap = kDefaultGedNodeCap);

}  // namespace kgeval
