// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "kgeval/batch.hpp"
#include "kgeval/correlation.hpp"
#include "kgeval/error.hpp"
#include "kgeval/fidelity.hpp"
#include "kgeval/io.hpp"
#include "kgeval/kg_dsl.hpp"
#include "kgeval/readability.hpp"
#include "kgeval/report.hpp"
#include "kgeval/scoring.hpp"
#include "oracles.hpp"

using namespace kgeval;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const fs::path kFixtures = KGEVAL_FIXTURE_DIR;

struct Outcome {
  bool ok = true;
  std::string note;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      note = what;
    }
  }
};

int failures = 0;

void run(const std::string& name, double budget_seconds, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = Clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.ok = false;
    out.note = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (out.ok && secs >= budget_seconds) {
    out.ok = false;
    out.note = "took " + std::to_string(secs) + " s, budget " + std::to_string(budget_seconds) + " s";
  }
  if (!out.ok) ++failures;
  std::printf("%s %-28s %8.3f s%s%s\n", out.ok ? "PASS" : "FAIL", name.c_str(), secs, out.ok ? "" : "  ",
              out.note.c_str());
  std::fflush(stdout);
}

void readability_exactness(Outcome& o) {
  o.expect(readability_score(70) == 1.0, "R(70) != 1");
  o.expect(readability_score(160) == 0.0, "R(160) != 0");
  o.expect(readability_score(115) == 0.5, "R(115) != 0.5");
  std::mt19937 rng(101);
  std::uniform_int_distribution<std::int64_t> interior(71, 159);
  for (int i = 0; i < 20; ++i) {
    const std::int64_t n = interior(rng);
    const double expected = static_cast<double>(160 - n) / static_cast<double>(160 - 70);
    o.expect(std::abs(readability_score(n) - expected) <= 1e-12, "R(" + std::to_string(n) + ") off");
  }
}

void product_exactness(Outcome& o) {
  std::mt19937 rng(103);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    FidelityScore f;
    ReadabilityResult r;
    f.one_minus_ged = u(rng);
    r.score = u(rng);
    o.expect(std::abs(mmmg_score(f, r) - f.one_minus_ged * r.score) <= 1e-12, "product mismatch");
  }
}

void oracle_equivalence(Outcome& o) {
  std::mt19937 rng(107);
  for (int i = 0; i < 1200; ++i) {
    const auto ref = oracle::random_graph(rng, 8, 10);
    const auto verdicts = oracle::random_verdicts(rng, ref);
    const auto fast = fidelity_from_verdicts(ref, verdicts);
    const auto sub = subgraph_from_verdicts(ref, verdicts);
    const double exact = 1.0 - exact_ged(sub.graph, ref) / static_cast<double>(ref.size());
    o.expect(fast.one_minus_ged == exact, "fast path != exact GED at graph " + std::to_string(i));
    o.expect(fast.one_minus_ged == fast.u_acc, "one_minus_ged != u_acc at graph " + std::to_string(i));
  }
}

void worked_example(Outcome& o) {
  const auto ref = parse_kg_json(read_file(kFixtures / "neuron.kg.json"));
  o.expect(ref.entities().size() == 9, "entity count");
  o.expect(ref.dependencies().size() == 8, "dependency count");
  const auto f = fidelity_from_verdicts(ref, all_present(ref));
  o.expect(f.one_minus_ged == 1.0 && f.u_acc == 1.0, "all-true fidelity != 1");
}

void dsl_round_trip(Outcome& o) {
  std::mt19937 rng(109);
  const std::string letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 -'_.";
  std::uniform_int_distribution<std::size_t> len(1, 20), ch(0, letters.size() - 1), kind(0, 5),
      mod(0, oracle::modifier_pool().size() - 1);
  std::bernoulli_distribution wrap(0.4);
  auto term = [&] {
    std::string s;
    while (tidy_label(s).empty()) {
      s.clear();
      for (std::size_t i = len(rng); i > 0; --i) s.push_back(letters[ch(rng)]);
    }
    Term t{EntityLabel(s), std::nullopt};
    if (wrap(rng)) t.modifier = Modifier(oracle::modifier_pool()[mod(rng)]);
    return t;
  };
  int with_modifiers = 0;
  for (int i = 0; i < 10000; ++i) {
    const Dependency d{kAllPredicateKinds[kind(rng)], term(), term()};
    if (d.left.modifier || d.right.modifier) ++with_modifiers;
    const std::string text = serialize_dependency(d);
    const Dependency back = parse_dependency(text);
    o.expect(back == d && serialize_dependency(back) == text, "round-trip failed on " + text);
  }
  o.expect(with_modifiers > 1000, "too few modifier terms generated");

  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_int_distribution<std::size_t> blen(0, 64);
  for (int i = 0; i < 1000000; ++i) {
    std::string s;
    for (std::size_t k = blen(rng); k > 0; --k) s.push_back(static_cast<char>(byte(rng)));
    try {
      parse_dependency(s);
    } catch (const Error&) {
    }
  }
}

void pipeline_golden(Outcome& o) {
  const auto items = load_manifest(kFixtures / "pipeline" / "manifest.ndjson").items;
  o.expect(items.size() == 6, "fixture manifest size");
  ReplayBackend backend(kFixtures / "pipeline" / "replies", "canned");
  EvalConfig config;
  config.sleep = [](std::chrono::milliseconds) {};
  const std::string golden = read_file(kFixtures / "pipeline" / "expected_report.md");
  for (int rerun = 0; rerun < 2; ++rerun) {
    for (std::size_t workers : {1u, 4u, 8u}) {
      config.max_inflight = workers;
      const auto report = evaluate_batch(items, backend, config);
      const std::string md = render_report_markdown(report);
      o.expect(md == golden, "report differs with " + std::to_string(workers) + " workers");
      o.expect(report.failures.empty(), "fixture items failed");
    }
  }
  o.expect(golden.find("| Model | Preschool | Primary | Secondary | High | Undergrad | PhD | Avg |") !=
               std::string::npos,
           "level table header");
  o.expect(golden.find("| model-a | 38.24 | 100.00 | 0.00 | - | - | - | 46.08 |") != std::string::npos,
           "level table row");
}

void error_taxonomy(Outcome& o) {
  auto item = [](double mmmg, double read, double recall, double dep) {
    ItemResult r;
    r.mmmg_score = mmmg;
    r.readability.score = read;
    r.fidelity.entity_recall = recall;
    r.fidelity.dependency_accuracy = dep;
    return categorize_errors(r);
  };
  using C = ErrorClass;
  const double above = std::nextafter(0.5, 1.0);
  o.expect(item(0.5, 0.5, 1, 1) == std::set<C>{C::VisualReadability}, "readability boundary");
  o.expect(item(0.5, above, 1, 1).empty(), "readability just above");
  o.expect(item(0.3, 1, 0.3, 1) == std::set<C>{C::EntityRepresentation}, "recall boundary");
  o.expect(item(0.3, 1, std::nextafter(0.3, 1.0), 1).empty(), "recall just above");
  o.expect(item(0.4, 1, 1, 0.4) == std::set<C>{C::DependencyStructure}, "dependency boundary");
  o.expect(item(0.4, 1, 1, std::nextafter(0.4, 1.0)).empty(), "dependency just above");
  o.expect(item(above, 0, 0, 0).empty(), "gate just above");
  o.expect(item(0.5, 0, 0, 0) == std::set<C>{C::VisualReadability, C::EntityRepresentation, C::DependencyStructure},
           "gate boundary");
  o.expect(item(0.3, 0.4, 0.8, 0.9) == std::set<C>{C::VisualReadability}, "worked example 1");
  o.expect(item(0.2, 0.9, 0.2, 0.3) == std::set<C>{C::EntityRepresentation, C::DependencyStructure},
           "worked example 2");
  o.expect(item(0.8, 0, 0, 0).empty(), "worked example 3");
}

void pearson_fixtures(Outcome& o) {
  const std::vector<double> x{1, 2, 3}, lin{3, 5, 7}, anti{-1, -2, -3};
  o.expect(std::abs(pearson(x, lin) - 1.0) <= 1e-12, "perfect linear");
  o.expect(std::abs(pearson(x, anti) + 1.0) <= 1e-12, "anti-linear");
  // Hand-computed: sums give r = (n*Sxy - Sx*Sy) / sqrt((n*Sxx - Sx^2)(n*Syy - Sy^2)).
  const std::vector<double> a{1, 2, 3, 4}, b{1, 3, 2, 5};
  o.expect(std::abs(pearson(a, b) - 22.0 / std::sqrt(700.0)) <= 1e-9, "fixture 1");
  const std::vector<double> c{2, 4, 6, 8, 10}, d{1, 2, 2, 3, 7};
  // Sx=30 Sy=15 Sxy=116 Sxx=220 Syy=67, n=5: (580-450)/sqrt(200*110).
  o.expect(std::abs(pearson(c, d) - 130.0 / std::sqrt(22000.0)) <= 1e-9, "fixture 2");
  const std::vector<double> e{0, 1, 0, 1, 0, 1}, f{5, 3, 4, 2, 6, 1};
  // Sx=3 Sy=21 Sxy=6 Sxx=3 Syy=91, n=6: (36-63)/sqrt(9*105).
  o.expect(std::abs(pearson(e, f) - (-27.0) / std::sqrt(945.0)) <= 1e-9, "fixture 3");
}

}  // namespace

int main() {
  run("readability-ramp", 1.0, readability_exactness);
  run("score-product", 1.0, product_exactness);
  run("oracle-equivalence", 60.0, oracle_equivalence);
  run("neuron-worked-example", 5.0, worked_example);
  run("dsl-round-trip-and-fuzz", 120.0, dsl_round_trip);
  run("pipeline-golden", 60.0, pipeline_golden);
  run("error-taxonomy", 1.0, error_taxonomy);
  run("pearson", 1.0, pearson_fixtures);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
