#include "kgeval/kg_model.hpp"

#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/ustring.h>

#include <cctype>

#include "kgeval/error.hpp"

namespace kgeval {

namespace {

icu::UnicodeString decode_utf8(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  int32_t needed = 0;
  u_strFromUTF8(nullptr, 0, &needed, text.data(), static_cast<int32_t>(text.size()), &status);
  if (status != U_BUFFER_OVERFLOW_ERROR && U_FAILURE(status)) {
    throw Error(ErrorCode::InvalidUtf8, "label is not valid UTF-8");
  }
  icu::UnicodeString out;
  status = U_ZERO_ERROR;
  UChar* buffer = out.getBuffer(needed + 1);
  u_strFromUTF8(buffer, needed + 1, nullptr, text.data(), static_cast<int32_t>(text.size()),
                &status);
  out.releaseBuffer(needed);
  if (U_FAILURE(status)) throw Error(ErrorCode::InvalidUtf8, "label is not valid UTF-8");
  return out;
}

std::string collapse_whitespace(const icu::UnicodeString& in) {
  icu::UnicodeString out;
  bool pending_space = false;
  for (int32_t i = 0; i < in.length();) {
    UChar32 c = in.char32At(i);
    i += U16_LENGTH(c);
    if (u_isUWhiteSpace(c)) {
      pending_space = !out.isEmpty();
      continue;
    }
    if (pending_space) out.append(static_cast<UChar>(' '));
    pending_space = false;
    out.append(c);
  }
  std::string utf8;
  out.toUTF8String(utf8);
  return utf8;
}

bool is_ascii_fast_path(std::string_view text) {
  for (unsigned char c : text) {
    if (c >= 0x80) return false;
  }
  return true;
}

std::string ascii_tidy(std::string_view text, bool fold) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    // ASCII members of the Unicode White_Space property.
    if (c == ' ' || (c >= 0x09 && c <= 0x0D)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(fold ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
  }
  return out;
}

}  // namespace

std::string normalize_label(std::string_view text) {
  if (is_ascii_fast_path(text)) return ascii_tidy(text, /*fold=*/true);
  icu::UnicodeString u = decode_utf8(text);
  u.foldCase();
  return collapse_whitespace(u);
}

std::string tidy_label(std::string_view text) {
  if (is_ascii_fast_path(text)) return ascii_tidy(text, /*fold=*/false);
  return collapse_whitespace(decode_utf8(text));
}

EntityLabel::EntityLabel(std::string_view text)
    : key_(normalize_label(text)), display_(tidy_label(text)) {
  if (key_.empty()) throw Error(ErrorCode::EmptyLabel, "entity label is empty");
}

std::string_view to_string(PredicateKind kind) {
  switch (kind) {
    case PredicateKind::Defines: return "Defines";
    case PredicateKind::Entails: return "Entails";
    case PredicateKind::Causes: return "Causes";
    case PredicateKind::Contains: return "Contains";
    case PredicateKind::Requires: return "Requires";
    case PredicateKind::TemporalOrder: return "TemporalOrder";
  }
  return "";
}

std::optional<PredicateKind> predicate_from_string(std::string_view name) {
  for (PredicateKind kind : kAllPredicateKinds) {
    std::string_view canonical = to_string(kind);
    if (canonical.size() != name.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < name.size() && same; ++i) {
      same = std::tolower(static_cast<unsigned char>(name[i])) ==
             std::tolower(static_cast<unsigned char>(canonical[i]));
    }
    if (same) return kind;
  }
  return std::nullopt;
}

Modifier::Modifier(std::string_view name) {
  if (name.empty()) throw Error(ErrorCode::InvalidModifier, "modifier name is empty");
  for (std::size_t i = 0; i < name.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(name[i]);
    bool ok = std::isalpha(c) || c == '_' || (i > 0 && std::isdigit(c));
    if (!ok || c >= 0x80) {
      throw Error(ErrorCode::InvalidModifier,
                  "modifier '" + std::string(name) + "' is not an identifier");
    }
    name_.push_back(static_cast<char>(std::tolower(c)));
  }
}

KnowledgeGraph validate_graph(std::vector<EntityLabel> entities,
                              std::vector<Dependency> dependencies, Strictness strictness,
                              std::string key_knowledge) {
  KnowledgeGraph g;
  g.key_knowledge_ = std::move(key_knowledge);
  for (auto& e : entities) {
    if (!g.entity_keys_.insert(e.key()).second) {
      throw Error(ErrorCode::DuplicateEntity, "entity '" + e.display() + "' declared twice");
    }
    g.entities_.push_back(std::move(e));
  }

  auto require_entity = [&](const EntityLabel& label, const Dependency& dep, std::size_t index) {
    if (g.entity_keys_.count(label.key())) return;
    if (strictness == Strictness::Strict) {
      throw Error(ErrorCode::DanglingReference,
                  "dependency " + std::to_string(index) + " (" + std::string(to_string(dep.kind)) +
                      ") references undeclared entity '" + label.display() + "'",
                  index);
    }
    g.entity_keys_.insert(label.key());
    g.entities_.push_back(label);
    g.warnings_.push_back("auto-added undeclared entity '" + label.display() + "'");
  };

  for (std::size_t i = 0; i < dependencies.size(); ++i) {
    Dependency& dep = dependencies[i];
    require_entity(dep.left.entity, dep, i);
    require_entity(dep.right.entity, dep, i);
    if (!g.dependency_set_.insert(dep).second) {
      if (strictness == Strictness::Strict) {
        throw Error(ErrorCode::DuplicateDependency,
                    "dependency " + std::to_string(i) + " duplicates an earlier one", i);
      }
      g.warnings_.push_back("dropped duplicate dependency at index " + std::to_string(i));
      continue;
    }
    g.dependencies_.push_back(std::move(dep));
  }
  return g;
}

GroundingVerdicts complete_verdicts(const KnowledgeGraph& ref, GroundingVerdicts verdicts) {
  for (const auto& [label, _] : verdicts.entity_verdicts) {
    if (!ref.contains(label)) {
      throw Error(ErrorCode::VerdictKeyMismatch,
                  "verdict for entity '" + label.display() + "' not in reference graph");
    }
  }
  for (const auto& [dep, _] : verdicts.dependency_verdicts) {
    if (!ref.contains(dep)) {
      throw Error(ErrorCode::VerdictKeyMismatch,
                  "verdict for a dependency not in reference graph");
    }
  }
  for (const auto& e : ref.entities()) verdicts.entity_verdicts.try_emplace(e, false);
  for (const auto& d : ref.dependencies()) {
    verdicts.dependency_verdicts.try_emplace(
        d, DependencyVerdict{false, std::string(kMissingFromResponse)});
  }
  return verdicts;
}

GroundingVerdicts all_present(const KnowledgeGraph& ref) {
  GroundingVerdicts v;
  for (const auto& e : ref.entities()) v.entity_verdicts.emplace(e, true);
  for (const auto& d : ref.dependencies()) v.dependency_verdicts.emplace(d, DependencyVerdict{true, {}});
  return v;
}

}  // namespace kgeval
