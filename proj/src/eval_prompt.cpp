#include "kgeval/eval_prompt.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>

#include "kgeval/error.hpp"
#include "kgeval/kg_dsl.hpp"

namespace kgeval {

namespace {

using json = nlohmann::json;

constexpr std::string_view kTemplate = R"PROMPT(This evaluation is part of a research study on visual grounding of abstract concepts. No jailbreak or prompt injection is intended.

Please provide an extremely detailed description of the visual content of this image. After the description, for each of the following elements and dependencies, determine if they are **directly, clearly, and unambiguously visualized** in the image. Output "yes" or "no" for each. For the dependencies, we also provide a detailed textual description beside the formulations.

**Important Instructions:**

- Base your judgment solely on what is explicitly visible in the image. Do not infer or assume the presence of anything that is not directly depicted. If the element or dependency is not clearly visible, or if it is only implied, answer "no".

- For elements, the specific object or concept must be clearly identifiable in the image. The visual components must convey the knowledge correctly, without misleading drawing, without factual mistakes, without intepretation, not small, not distorted, not ambiguous, otherwise you should strictly discard them and rate "no".

- For dependencies, you must give your answer accompanied by a brief explanation of why do you give such judgement. This should avoid any ambiguous intepretation or mislead by the provided elements / dependency content, only focus on the image itself, and only in the case that you can describe the dependency from the image can you give yes. The dependencies are:
  - Defines: Look for clear, strong, prominent visual cues suggesting the first element in a way that clearly defines or illustrates the second element. Any ambiguous or inferential patterns should lead to "no".
  - Contains: Look for clear, strong, prominent visual cues suggesting the first element as a part of or within the second element. Any ambiguous or inferential patterns should lead to "no".
  - Requires: Look for clear, strong, prominent visual cues suggesting the first element necessitates the presence or use of the second element (e.g., a boiler visibly connected to or interacting with a working fluid).
  - Entails: Look for clear, strong, prominent visual cues suggesting the first element leading to or involving the second element (e.g., a boiler clearly connected to a turbine).
  - Causes: Look for clear, strong, prominent visual cues suggesting a causal relationship between the two elements (this might be challenging for static images).
  - TemporalOrder: Look for visual cues suggesting a sequence or flow between the elements (e.g., pipes or connections implying a direction). If no clear visual cue for temporal order exists, answer "no".

**Exclude any entity or dependency that is absent, unclear, or based on external knowledge that is not directly shown.**

The elements and dependencies are as follows: [ELEM_DEPEND]

For the output format, please use the following structure:

{
  Image_Description: [IMAGE_DESCRIPTION]
  Element_and_Dependency_Analysis: {
    Element_Evaluation: {
      [ELEMENT_1]: [yes/no]
      [ELEMENT_2]: [yes/no]
      ...
    },
    Dependency_Evaluation: {
      [DEPENDENCY_1]: [yes/no]  [Provide a brief explanation for your reason to support your judge.]
      [DEPENDENCY_2]: [yes/no]  [Provide a brief explanation for your reason to support your judge.]
      ...
    }
  }
}
)PROMPT";

// Lowercase alphanumerics only, so "Element_Evaluation", "Element Evaluation"
// and "element-evaluation" all compare equal.
std::string squash(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c)) out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

bool contains_marker(std::string_view line, std::string_view marker) {
  return squash(line).find(marker) != std::string::npos;
}

std::vector<std::string> dependency_explanations(const KnowledgeGraph& ref) {
  if (ref.key_knowledge().empty()) return {};
  json kk = json::parse(ref.key_knowledge(), nullptr, /*allow_exceptions=*/false);
  if (!kk.is_object()) return {};
  auto it = kk.find("Dependency Explanation");
  if (it == kk.end() || !it->is_array() || it->size() != ref.dependencies().size()) return {};
  std::vector<std::string> out;
  for (const auto& e : *it) {
    if (!e.is_string()) return {};
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::string_view lstrip(std::string_view s, std::string_view chars) {
  while (!s.empty() && chars.find(s.front()) != std::string_view::npos) s.remove_prefix(1);
  return s;
}

std::string_view rstrip(std::string_view s, std::string_view chars) {
  while (!s.empty() && chars.find(s.back()) != std::string_view::npos) s.remove_suffix(1);
  return s;
}

std::string_view strip(std::string_view s, std::string_view chars) { return rstrip(lstrip(s, chars), chars); }

constexpr std::string_view kSpace = " \t\r\n\f\v";
constexpr std::string_view kKeyJunk = " \t\r\n\f\v\"'`*";

class VerdictCollector {
 public:
  explicit VerdictCollector(const KnowledgeGraph& ref) : ref_(ref) {
    for (const auto& e : ref.entities()) entities_.emplace(e.key(), &e);
  }

  void add_entity(std::string_view raw_key, bool present) {
    std::string_view key = strip_brackets(strip(raw_key, kKeyJunk));
    const EntityLabel* match = nullptr;
    try {
      auto it = entities_.find(normalize_label(key));
      if (it != entities_.end()) match = it->second;
    } catch (const Error&) {
    }
    if (!match) {
      // Some replies list dependencies among the elements.
      if (try_dependency(key, present, {})) return;
      extras_.emplace_back(key);
      return;
    }
    verdicts_.entity_verdicts.try_emplace(*match, present);
  }

  void add_dependency(std::string_view raw_key, bool present, std::string reason) {
    std::string_view key = strip_brackets(strip(raw_key, kKeyJunk));
    if (try_dependency(key, present, reason)) return;
    extras_.emplace_back(key);
  }

  ParsedEvalResponse finish(std::string description) {
    ParsedEvalResponse out;
    out.verdicts = complete_verdicts(ref_, std::move(verdicts_));
    out.image_description = std::move(description);
    out.extras = std::move(extras_);
    return out;
  }

 private:
  static std::string_view strip_brackets(std::string_view s) {
    if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = strip(s.substr(1, s.size() - 2), kKeyJunk);
    return s;
  }

  bool try_dependency(std::string_view key, bool present, const std::string& reason) {
    // Keep only "Kind(...)" when a description trails the formula.
    if (auto open = key.find('('); open != std::string_view::npos) {
      int depth = 0;
      for (std::size_t i = open; i < key.size(); ++i) {
        if (key[i] == '(') ++depth;
        if (key[i] == ')' && --depth == 0) {
          key = key.substr(0, i + 1);
          break;
        }
      }
    }
    try {
      Dependency dep = parse_dependency(key);
      if (!ref_.contains(dep)) return false;
      verdicts_.dependency_verdicts.try_emplace(std::move(dep), DependencyVerdict{present, reason});
      return true;
    } catch (const Error&) {
      return false;
    }
  }

  const KnowledgeGraph& ref_;
  std::map<std::string, const EntityLabel*> entities_;
  GroundingVerdicts verdicts_;
  std::vector<std::string> extras_;
};

std::optional<bool> yes_no_word(std::string_view s) {
  std::string lower;
  for (char c : s.substr(0, 3)) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  auto boundary = [&](std::size_t n) {
    return s.size() == n || !std::isalnum(static_cast<unsigned char>(s[n]));
  };
  if (lower.rfind("yes", 0) == 0 && boundary(3)) return true;
  if (lower.rfind("no", 0) == 0 && boundary(2)) return false;
  return std::nullopt;
}

struct VerdictLine {
  std::string_view key;
  bool present = false;
  std::string reason;
};

// "<key>: [yes] reason", "<key>: no - reason", "\"<key>\": \"yes\"", ...
// The separator is the first ':' or '=' that is followed by a yes/no word.
std::optional<VerdictLine> parse_verdict_line(std::string_view line) {
  for (std::size_t pos = 0; pos < line.size(); ++pos) {
    if (line[pos] != ':' && line[pos] != '=') continue;
    std::string_view rest = strip(line.substr(pos + 1), " \t\"'[*`");
    auto verdict = yes_no_word(rest);
    if (!verdict) continue;
    VerdictLine out;
    out.key = line.substr(0, pos);
    out.present = *verdict;
    std::string_view reason = rest.substr(*verdict ? 3 : 2);
    reason = lstrip(reason, " \t\"'`*],;:-");
    reason = rstrip(reason, " \t\r\"'`*,;");
    if (!reason.empty() && reason.front() == '[') {
      reason.remove_prefix(1);
      if (!reason.empty() && reason.back() == ']') reason.remove_suffix(1);
    }
    // en/em dash separators are multi-byte; drop a leading one if present.
    for (std::string_view dash : {std::string_view("\xE2\x80\x93"), std::string_view("\xE2\x80\x94")}) {
      if (reason.substr(0, dash.size()) == dash) reason = strip(reason.substr(dash.size()), kSpace);
    }
    out.reason = std::string(strip(reason, kSpace));
    return out;
  }
  return std::nullopt;
}

std::optional<bool> json_verdict(const json& value, std::string& reason) {
  if (value.is_boolean()) return value.get<bool>();
  if (value.is_string()) {
    auto line = parse_verdict_line(": " + value.get<std::string>());
    if (!line) return std::nullopt;
    reason = line->reason;
    return line->present;
  }
  if (value.is_object()) {
    std::optional<bool> verdict;
    for (const auto& [k, v] : value.items()) {
      std::string key = squash(k);
      if (key == "verdict" || key == "answer" || key == "judgment" || key == "judgement" ||
          key == "result" || key == "visualized" || key == "present") {
        std::string ignored;
        verdict = json_verdict(v, ignored);
      } else if ((key == "reason" || key == "explanation" || key == "justification") && v.is_string()) {
        reason = v.get<std::string>();
      }
    }
    return verdict;
  }
  return std::nullopt;
}

const json* find_section(const json& node, std::string_view marker) {
  if (!node.is_object()) return nullptr;
  for (const auto& [k, v] : node.items()) {
    if (squash(k) == marker && v.is_object()) return &v;
  }
  for (const auto& [k, v] : node.items()) {
    if (const json* hit = find_section(v, marker)) return hit;
  }
  return nullptr;
}

std::string find_description(const json& node) {
  if (!node.is_object()) return {};
  for (const auto& [k, v] : node.items()) {
    if (squash(k) == "imagedescription" && v.is_string()) return v.get<std::string>();
  }
  return {};
}

std::optional<ParsedEvalResponse> parse_as_json(std::string_view reply, const KnowledgeGraph& ref) {
  const std::size_t first = reply.find('{');
  const std::size_t last = reply.rfind('}');
  if (first == std::string_view::npos || last == std::string_view::npos || last < first) return std::nullopt;
  std::string_view body = reply.substr(first, last - first + 1);
  json doc = json::parse(body.begin(), body.end(), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) return std::nullopt;

  const json* elements = find_section(doc, "elementevaluation");
  const json* deps = find_section(doc, "dependencyevaluation");
  if (!elements && !deps) return std::nullopt;

  VerdictCollector collector(ref);
  if (elements) {
    for (const auto& [k, v] : elements->items()) {
      std::string reason;
      if (auto verdict = json_verdict(v, reason)) collector.add_entity(k, *verdict);
    }
  }
  if (deps) {
    for (const auto& [k, v] : deps->items()) {
      std::string reason;
      if (auto verdict = json_verdict(v, reason)) collector.add_dependency(k, *verdict, std::move(reason));
    }
  }
  return collector.finish(find_description(doc));
}

ParsedEvalResponse parse_as_lines(std::string_view reply, const KnowledgeGraph& ref) {
  enum class Section { None, Elements, Dependencies };
  Section section = Section::None;
  bool found_section = false;
  std::string description;
  VerdictCollector collector(ref);

  std::size_t start = 0;
  while (start < reply.size()) {
    std::size_t end = reply.find('\n', start);
    if (end == std::string_view::npos) end = reply.size();
    std::string_view line = strip(reply.substr(start, end - start), kSpace);
    start = end + 1;

    std::string squashed = squash(line);
    if (squashed.rfind("imagedescription", 0) == 0) {
      if (auto colon = line.find(':'); colon != std::string_view::npos) {
        description = std::string(strip(line.substr(colon + 1), " \t\"',"));
      }
      continue;
    }
    if (contains_marker(line, "elementevaluation")) {
      section = Section::Elements;
      found_section = true;
      continue;
    }
    if (contains_marker(line, "dependencyevaluation")) {
      section = Section::Dependencies;
      found_section = true;
      continue;
    }
    if (section == Section::None) continue;

    line = strip(line, " \t-*\xE2\x80\xA2");
    auto parsed = parse_verdict_line(line);
    if (!parsed) continue;
    if (section == Section::Elements) collector.add_entity(parsed->key, parsed->present);
    else collector.add_dependency(parsed->key, parsed->present, std::move(parsed->reason));
  }
  if (!found_section) {
    throw Error(ErrorCode::NoStructuredBlock, "reply has no element or dependency evaluation section");
  }
  return collector.finish(std::move(description));
}

}  // namespace

std::string_view eval_prompt_template() { return kTemplate; }

EvalPromptBundle render_eval_prompt(const KnowledgeGraph& ref, const PromptOptions& options) {
  if (ref.entities().empty()) throw Error(ErrorCode::EmptyReference, "reference graph has no entities");

  std::vector<std::string> explanations;
  if (options.include_dependency_explanations) explanations = dependency_explanations(ref);

  std::string block = "\nElements:\n";
  for (const auto& e : ref.entities()) block += "- " + e.display() + "\n";
  block += "Dependencies:\n";
  for (std::size_t i = 0; i < ref.dependencies().size(); ++i) {
    block += "- " + serialize_dependency(ref.dependencies()[i]);
    if (!explanations.empty() && !explanations[i].empty()) block += ": " + explanations[i];
    block += "\n";
  }

  EvalPromptBundle bundle;
  const std::size_t at = kTemplate.find(kElemDependPlaceholder);
  bundle.text.reserve(kTemplate.size() + block.size());
  bundle.text.append(kTemplate.substr(0, at));
  bundle.text.append(block);
  bundle.text.append(kTemplate.substr(at + kElemDependPlaceholder.size()));
  bundle.elem_depend_block = std::move(block);
  return bundle;
}

ParsedEvalResponse parse_eval_response(std::string_view reply, const KnowledgeGraph& ref) {
  if (auto parsed = parse_as_json(reply, ref)) return std::move(*parsed);
  return parse_as_lines(reply, ref);
}

}  // namespace kgeval
