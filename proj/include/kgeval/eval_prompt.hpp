#pragma once
// Grounding prompt: asks a vision-capable LLM to judge, item by item, whether
// each reference entity and dependency is directly visualized in an image.

#include <string>
#include <string_view>
#include <vector>

#include "kgeval/kg_model.hpp"

namespace kgeval {

/// The prompt template; "[ELEM_DEPEND]" is the single substitution point.
std::string_view eval_prompt_template();
inline constexpr std::string_view kElemDependPlaceholder = "[ELEM_DEPEND]";

struct EvalPromptBundle {
  std::string text;
  std::string elem_depend_block;
  /// Filled by the caller before sending.
  std::string image_bytes;
  std::string media_type;
};

struct PromptOptions {
  /// Append the graph's "Dependency Explanation" entries (when their count
  /// matches the dependency count) as "- Kind(a, b): explanation".
  bool include_dependency_explanations = true;
};

/// Block layout:
///   \nElements:\n- <entity>\n...\nDependencies:\n- <Kind(a, b)>[: explanation]\n...
/// Entities and dependencies keep reference order. Throws EmptyReference.
EvalPromptBundle render_eval_prompt(const KnowledgeGraph& ref, const PromptOptions& options = {});

struct ParsedEvalResponse {
  /// Completed against the reference: every item present, unmentioned ones false.
  GroundingVerdicts verdicts;
  std::string image_description;
  /// Keys in the reply that match nothing in the reference (ignored for scoring).
  std::vector<std::string> extras;
};

/// Accepts JSON or the loose "key: [yes/no] reason" layout, with or without
/// code fences and surrounding prose. Keys match by normalized label or by
/// parsed dependency. Throws NoStructuredBlock when neither an element nor a
/// dependency evaluation section can be found.
ParsedEvalResponse parse_eval_response(std::string_view reply, const KnowledgeGraph& ref);

}  // namespace kgeval
