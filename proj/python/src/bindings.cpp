#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kgeval/batch.hpp"
#include "kgeval/correlation.hpp"
#include "kgeval/error.hpp"
#include "kgeval/eval_prompt.hpp"
#include "kgeval/fidelity.hpp"
#include "kgeval/io.hpp"
#include "kgeval/kg_dsl.hpp"
#include "kgeval/readability.hpp"
#include "kgeval/report.hpp"
#include "kgeval/scoring.hpp"

namespace py = pybind11;
using namespace kgeval;

namespace {

Strictness strictness(bool lenient) { return lenient ? Strictness::Lenient : Strictness::Strict; }

std::vector<std::string> entity_names(const KnowledgeGraph& g) {
  std::vector<std::string> out;
  for (const auto& e : g.entities()) out.push_back(e.display());
  return out;
}

std::vector<std::string> dependency_strings(const KnowledgeGraph& g) {
  std::vector<std::string> out;
  for (const auto& d : g.dependencies()) out.push_back(serialize_dependency(d));
  return out;
}

GroundingVerdicts to_verdicts(const std::map<std::string, bool>& entities, const std::map<std::string, bool>& deps) {
  GroundingVerdicts v;
  for (const auto& [name, present] : entities) v.entity_verdicts.insert_or_assign(EntityLabel(name), present);
  for (const auto& [text, present] : deps) {
    v.dependency_verdicts.insert_or_assign(parse_dependency(text), DependencyVerdict{present, ""});
  }
  return v;
}

py::dict fidelity_dict(const FidelityScore& f) {
  py::dict d;
  d["one_minus_ged"] = f.one_minus_ged;
  d["u_acc"] = f.u_acc;
  d["entity_recall"] = f.entity_recall;
  d["dependency_accuracy"] = f.dependency_accuracy;
  d["missing_entities"] = f.missing_entities;
  d["missing_dependencies"] = f.missing_dependencies;
  return d;
}

ReadabilityConfig readability_config(double overlap_threshold, std::int64_t n_min, std::int64_t n_max) {
  return {overlap_threshold, n_min, n_max};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Knowledge-image evaluation core";

  static py::exception<Error> error_type(m, "KgevalError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error_type.ptr())(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.def("normalize_label", &normalize_label, py::arg("text"));
  m.def(
      "canonical_dependency", [](const std::string& text) { return serialize_dependency(parse_dependency(text)); },
      py::arg("text"));

  py::class_<KnowledgeGraph>(m, "KnowledgeGraph")
      .def_property_readonly("entities", &entity_names)
      .def_property_readonly("dependencies", &dependency_strings)
      .def_property_readonly("warnings", &KnowledgeGraph::warnings)
      .def("__len__", &KnowledgeGraph::size)
      .def("__eq__", [](const KnowledgeGraph& a, const KnowledgeGraph& b) { return a == b; })
      .def("to_json", &serialize_kg_json);

  m.def(
      "parse_kg_json", [](const std::string& text, bool lenient) { return parse_kg_json(text, strictness(lenient)); },
      py::arg("text"), py::arg("lenient") = false);
  m.def(
      "load_kg", [](const std::string& path, bool lenient) { return parse_kg_json(read_file(path), strictness(lenient)); },
      py::arg("path"), py::arg("lenient") = false);

  m.def(
      "fidelity",
      [](const KnowledgeGraph& ref, const std::map<std::string, bool>& entities,
         const std::map<std::string, bool>& dependencies, bool independent) {
        return fidelity_dict(fidelity_from_verdicts(ref, to_verdicts(entities, dependencies),
                                                    independent ? EndpointPolicy::Independent : EndpointPolicy::Drop));
      },
      py::arg("ref"), py::arg("entities"), py::arg("dependencies"), py::arg("independent") = false,
      "Fidelity of a reference graph under yes/no verdicts; unmentioned items count as absent.");
  m.def(
      "grounded_subgraph",
      [](const KnowledgeGraph& ref, const std::map<std::string, bool>& entities,
         const std::map<std::string, bool>& dependencies) {
        return subgraph_from_verdicts(ref, to_verdicts(entities, dependencies)).graph;
      },
      py::arg("ref"), py::arg("entities"), py::arg("dependencies"));
  m.def(
      "exact_ged", [](const KnowledgeGraph& a, const KnowledgeGraph& b, std::size_t cap) { return exact_ged(a, b, {}, cap); },
      py::arg("g1"), py::arg("g2"), py::arg("node_cap") = kDefaultGedNodeCap);
  m.def("normalized_ged", &normalized_ged, py::arg("gen"), py::arg("ref"), py::arg("node_cap") = kDefaultGedNodeCap);

  m.def("readability_score", &readability_score, py::arg("n_vis"), py::arg("n_min") = kDefaultNMin,
        py::arg("n_max") = kDefaultNMax);
  m.def(
      "readability",
      [](const std::string& regions_json, double overlap_threshold, std::int64_t n_min, std::int64_t n_max) {
        const auto parsed = parse_regions_json(regions_json);
        const auto merged = merge_regions(parsed.regions, overlap_threshold);
        const auto r = readability(parsed.regions, readability_config(overlap_threshold, n_min, n_max));
        py::dict d;
        d["n_vis"] = r.n_vis;
        d["score"] = r.score;
        d["group_of"] = merged.group_of;
        d["warnings"] = parsed.warnings;
        return d;
      },
      py::arg("regions_json"), py::arg("overlap_threshold") = kDefaultOverlapThreshold,
      py::arg("n_min") = kDefaultNMin, py::arg("n_max") = kDefaultNMax);

  m.def(
      "mmmg_score",
      [](double one_minus_ged, double readability_score) {
        FidelityScore f;
        f.one_minus_ged = one_minus_ged;
        ReadabilityResult r;
        r.score = readability_score;
        return mmmg_score(f, r);
      },
      py::arg("one_minus_ged"), py::arg("readability"));
  m.def(
      "categorize_errors",
      [](double mmmg, double readability_score, double entity_recall, double dependency_accuracy) {
        ItemResult r;
        r.mmmg_score = mmmg;
        r.readability.score = readability_score;
        r.fidelity.entity_recall = entity_recall;
        r.fidelity.dependency_accuracy = dependency_accuracy;
        std::vector<std::string> out;
        for (ErrorClass c : categorize_errors(r)) out.emplace_back(to_string(c));
        return out;
      },
      py::arg("mmmg"), py::arg("readability"), py::arg("entity_recall"), py::arg("dependency_accuracy"));
  m.def(
      "pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return pearson(x, y); },
      py::arg("x"), py::arg("y"));

  m.def(
      "render_eval_prompt",
      [](const KnowledgeGraph& ref, bool explanations) {
        PromptOptions o;
        o.include_dependency_explanations = explanations;
        return render_eval_prompt(ref, o).text;
      },
      py::arg("ref"), py::arg("include_explanations") = true);
  m.def(
      "parse_eval_response",
      [](const std::string& reply, const KnowledgeGraph& ref) {
        const auto parsed = parse_eval_response(reply, ref);
        py::dict entities, deps;
        for (const auto& [e, present] : parsed.verdicts.entity_verdicts) entities[py::str(e.display())] = present;
        for (const auto& [d, v] : parsed.verdicts.dependency_verdicts) {
          deps[py::str(serialize_dependency(d))] = py::make_tuple(v.present, v.reason);
        }
        py::dict out;
        out["entities"] = entities;
        out["dependencies"] = deps;
        out["image_description"] = parsed.image_description;
        out["extras"] = parsed.extras;
        return out;
      },
      py::arg("reply"), py::arg("ref"));

  m.def(
      "evaluate_replay",
      [](const std::string& manifest_path, const std::string& replay_dir, std::size_t max_inflight, bool ged_only) {
        const auto manifest = load_manifest(manifest_path);
        ReplayBackend backend(replay_dir, "replay");
        EvalConfig config;
        config.max_inflight = max_inflight;
        config.ged_only = ged_only;
        config.retry.max_retries = 0;
        Report report;
        {
          py::gil_scoped_release release;
          report = evaluate_batch(manifest.items, backend, config);
        }
        py::dict out;
        out["results_json"] = results_to_json(report.results);
        out["report_markdown"] = render_report_markdown(report);
        out["histogram_csv"] = render_histogram_csv(report);
        out["failures_json"] = failures_to_json(report.failures);
        return out;
      },
      py::arg("manifest"), py::arg("replay_dir"), py::arg("max_inflight") = 8, py::arg("ged_only") = false,
      "Batch evaluation answering from <replay_dir>/<item_id>.txt.");
}
