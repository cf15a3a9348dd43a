#include <doctest.h>

#include <random>

#include "kgeval/error.hpp"
#include "kgeval/fidelity.hpp"
#include "kgeval/io.hpp"
#include "kgeval/kg_dsl.hpp"
#include "oracles.hpp"

using namespace kgeval;

namespace {

KnowledgeGraph neuron() { return parse_kg_json(read_file(std::filesystem::path(KGEVAL_FIXTURE_DIR) / "neuron.kg.json")); }

void set_entity(GroundingVerdicts& v, std::string_view e, bool present) {
  v.entity_verdicts.insert_or_assign(EntityLabel(e), present);
}

void set_dep(GroundingVerdicts& v, std::string_view d, bool present) {
  v.dependency_verdicts.insert_or_assign(parse_dependency(d), DependencyVerdict{present, ""});
}

KnowledgeGraph graph(std::vector<std::string> entities, std::vector<std::string> deps) {
  std::vector<EntityLabel> e;
  for (auto& s : entities) e.emplace_back(s);
  std::vector<Dependency> d;
  for (auto& s : deps) d.push_back(parse_dependency(s));
  return validate_graph(std::move(e), std::move(d));
}

}  // namespace

TEST_CASE("all-true verdicts give perfect fidelity") {
  auto ref = neuron();
  auto f = fidelity_from_verdicts(ref, all_present(ref));
  CHECK(f.one_minus_ged == 1.0);
  CHECK(f.u_acc == 1.0);
  CHECK(f.entity_recall == 1.0);
  CHECK(f.dependency_accuracy == 1.0);
}

TEST_CASE("neuron 13 of 17") {
  auto ref = neuron();
  auto v = all_present(ref);
  set_entity(v, "schwann cell", false);
  set_entity(v, "node of ranvier", false);
  set_dep(v, "Contains(myelin sheath, schwann cell)", false);
  set_dep(v, "Contains(axon, node of Ranvier)", false);
  auto f = fidelity_from_verdicts(ref, v);
  CHECK(f.one_minus_ged == doctest::Approx(13.0 / 17.0).epsilon(1e-15));
  CHECK(f.u_acc == f.one_minus_ged);
  CHECK(f.entity_recall == doctest::Approx(7.0 / 9.0));
  CHECK(f.dependency_accuracy == doctest::Approx(6.0 / 8.0));
  CHECK(f.missing_entities == 2);
  CHECK(f.missing_dependencies == 2);

  auto sub = subgraph_from_verdicts(ref, v);
  CHECK(normalized_ged(sub.graph, ref) == doctest::Approx(4.0 / 17.0));
  CHECK(sub.warnings.empty());
}

TEST_CASE("a false endpoint drops its incident dependencies") {
  auto ref = neuron();
  auto v = all_present(ref);
  set_entity(v, "axon", false);
  auto sub = subgraph_from_verdicts(ref, v);
  // Contains(cell body, axon), Contains(axon, myelin sheath), Contains(axon, node of Ranvier)
  // and Requires(action potential propagation, axon) all touch the axon.
  CHECK(sub.graph.entities().size() == 8);
  CHECK(sub.graph.dependencies().size() == 4);
  CHECK(sub.warnings.size() == 4);

  auto drop = fidelity_from_verdicts(ref, v);
  CHECK(drop.missing_entities == 1);
  CHECK(drop.missing_dependencies == 4);
  CHECK(drop.one_minus_ged == doctest::Approx(12.0 / 17.0));

  auto independent = fidelity_from_verdicts(ref, v, EndpointPolicy::Independent);
  CHECK(independent.missing_dependencies == 0);
  CHECK(independent.one_minus_ged == doctest::Approx(16.0 / 17.0));
}

TEST_CASE("empty verdicts default every item to missing") {
  auto ref = neuron();
  auto f = fidelity_from_verdicts(ref, {});
  CHECK(f.one_minus_ged == 0.0);
  CHECK(f.u_acc == 0.0);
  auto sub = subgraph_from_verdicts(ref, {});
  CHECK(sub.graph.empty());
}

TEST_CASE("empty reference is rejected") {
  KnowledgeGraph empty;
  CHECK_THROWS_AS(fidelity_from_verdicts(empty, {}), Error);
  CHECK_THROWS_AS(normalized_ged(empty, empty), Error);
}

TEST_CASE("exact GED worked values") {
  auto ref = neuron();
  CHECK(exact_ged(KnowledgeGraph{}, ref) == 17.0);
  CHECK(exact_ged(ref, KnowledgeGraph{}) == 17.0);
  CHECK(exact_ged(ref, ref, {}, 18) == 0.0);

  auto a = graph({"a", "b"}, {"Entails(a, b)"});
  auto b = graph({"a", "b"}, {"Causes(a, b)"});
  CHECK(exact_ged(a, b) == 1.0);
  auto c = graph({"a", "b"}, {"Entails(b, a)"});
  CHECK(exact_ged(a, c) == 2.0);
  auto d = graph({"a", "b"}, {"Entails(increase(a), b)"});
  CHECK(exact_ged(a, d) == 1.0);
  auto e = graph({"a", "c"}, {"Entails(a, c)"});
  CHECK(exact_ged(a, e) == 1.0);
}

TEST_CASE("exact GED honours custom costs") {
  auto a = graph({"a"}, {});
  auto b = graph({"b"}, {});
  EditCosts cheap_sub;
  CHECK(exact_ged(a, b, cheap_sub) == 1.0);
  EditCosts pricey_sub;
  pricey_sub.node_substitute = 5.0;
  CHECK(exact_ged(a, b, pricey_sub) == 2.0);
}

TEST_CASE("exact GED size cap") {
  std::vector<std::string> many;
  for (int i = 0; i < 9; ++i) many.push_back("n" + std::to_string(i));
  auto g = graph(many, {});
  CHECK(exact_ged(g, g, {}, 18) == 0.0);
  try {
    exact_ged(g, g);
    FAIL("expected SizeCapExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SizeCapExceeded);
  }
}

TEST_CASE("exact GED agrees with brute-force enumeration") {
  std::mt19937 rng(23);
  for (int i = 0; i < 300; ++i) {
    auto g1 = oracle::random_graph(rng, 4, 5, 0.2);
    auto g2 = oracle::random_graph(rng, 4, 5, 0.2);
    const int expected = oracle::brute_force_ged(g1, g2);
    CHECK(exact_ged(g1, g2) == static_cast<double>(expected));
  }
}

TEST_CASE("exact GED symmetry, identity and triangle inequality") {
  std::mt19937 rng(29);
  for (int i = 0; i < 200; ++i) {
    auto a = oracle::random_graph(rng, 5, 6);
    auto b = oracle::random_graph(rng, 5, 6);
    auto c = oracle::random_graph(rng, 5, 6);
    CHECK(exact_ged(a, a) == 0.0);
    CHECK(exact_ged(a, b) == exact_ged(b, a));
    CHECK(exact_ged(a, c) <= exact_ged(a, b) + exact_ged(b, c));
  }
}

TEST_CASE("exact GED on grounded subgraphs equals the missing count") {
  std::mt19937 rng(31);
  for (int i = 0; i < 300; ++i) {
    auto ref = oracle::random_graph(rng, 8, 10);
    auto v = oracle::random_verdicts(rng, ref);
    auto f = fidelity_from_verdicts(ref, v);
    auto sub = subgraph_from_verdicts(ref, v);
    CHECK(exact_ged(sub.graph, ref) == static_cast<double>(f.missing_entities + f.missing_dependencies));
    CHECK(f.one_minus_ged == 1.0 - exact_ged(sub.graph, ref) / static_cast<double>(ref.size()));
    CHECK(f.u_acc == f.one_minus_ged);
  }
}

TEST_CASE("fidelity properties on random verdicts") {
  std::mt19937 rng(37);
  for (int i = 0; i < 500; ++i) {
    auto ref = oracle::random_graph(rng, 8, 10);
    auto v = oracle::random_verdicts(rng, ref);
    auto f = fidelity_from_verdicts(ref, v);
    CHECK(f.one_minus_ged >= 0.0);
    CHECK(f.one_minus_ged <= 1.0);
    // Flipping one more item to present never lowers the score.
    auto better = complete_verdicts(ref, v);
    for (auto& [e, present] : better.entity_verdicts) {
      if (!present) {
        present = true;
        break;
      }
    }
    CHECK(fidelity_from_verdicts(ref, better).one_minus_ged >= f.one_minus_ged);
  }
}
