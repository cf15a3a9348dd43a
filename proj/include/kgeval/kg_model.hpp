#pragma once
// In-memory knowledge graphs and grounding verdicts.
//
// A KnowledgeGraph is a set of entities plus an ordered list of typed binary
// dependencies. Entities compare by their normalized key (case-folded,
// whitespace-collapsed, trimmed); the spelling first seen is kept for display
// so prompts can echo the reference text back to the grounding model.
//
// Everything here is immutable after construction.

#include <array>
#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace kgeval {

/// Unicode case fold + collapse internal whitespace runs to one space + trim.
/// Throws Error{InvalidUtf8} on malformed input. Idempotent.
std::string normalize_label(std::string_view text);

/// Whitespace collapse + trim only (case preserved).
std::string tidy_label(std::string_view text);

class EntityLabel {
 public:
  /// Throws Error{EmptyLabel} when nothing is left after normalization.
  explicit EntityLabel(std::string_view text);

  const std::string& key() const noexcept { return key_; }
  const std::string& display() const noexcept { return display_; }

  friend bool operator==(const EntityLabel& a, const EntityLabel& b) { return a.key_ == b.key_; }
  friend std::strong_ordering operator<=>(const EntityLabel& a, const EntityLabel& b) {
    return a.key_ <=> b.key_;
  }

 private:
  std::string key_;
  std::string display_;
};

enum class PredicateKind { Defines, Entails, Causes, Contains, Requires, TemporalOrder };

inline constexpr std::array<PredicateKind, 6> kAllPredicateKinds = {
    PredicateKind::Defines,  PredicateKind::Entails,  PredicateKind::Causes,
    PredicateKind::Contains, PredicateKind::Requires, PredicateKind::TemporalOrder};

std::string_view to_string(PredicateKind kind);
/// Case-insensitive lookup of the six predicate names.
std::optional<PredicateKind> predicate_from_string(std::string_view name);

/// Dynamic modifier such as change(), increase() or decrease(). Open vocabulary;
/// stored lowercase.
class Modifier {
 public:
  /// Accepts an ASCII identifier [A-Za-z_][A-Za-z0-9_]*; throws Error{InvalidModifier}.
  explicit Modifier(std::string_view name);
  const std::string& name() const noexcept { return name_; }
  friend auto operator<=>(const Modifier&, const Modifier&) = default;

 private:
  std::string name_;
};

struct Term {
  EntityLabel entity;
  std::optional<Modifier> modifier;

  friend bool operator==(const Term&, const Term&) = default;
  friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (auto c = a.entity <=> b.entity; c != 0) return c;
    if (a.modifier.has_value() != b.modifier.has_value())
      return a.modifier.has_value() ? std::strong_ordering::greater : std::strong_ordering::less;
    if (!a.modifier) return std::strong_ordering::equal;
    return a.modifier->name() <=> b.modifier->name();
  }
};

struct Dependency {
  PredicateKind kind;
  Term left;
  Term right;

  friend bool operator==(const Dependency&, const Dependency&) = default;
  friend std::strong_ordering operator<=>(const Dependency& a, const Dependency& b) {
    if (auto c = a.kind <=> b.kind; c != 0) return c;
    if (auto c = a.left <=> b.left; c != 0) return c;
    return a.right <=> b.right;
  }
};

enum class Strictness { Strict, Lenient };

class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  const std::vector<EntityLabel>& entities() const noexcept { return entities_; }
  const std::vector<Dependency>& dependencies() const noexcept { return dependencies_; }
  /// Issues found by lenient validation (auto-added entities, dropped duplicates).
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  /// Opaque "Key Knowledge" JSON text kept for provenance; empty when absent.
  const std::string& key_knowledge() const noexcept { return key_knowledge_; }

  bool contains(const EntityLabel& e) const { return entity_keys_.count(e.key()) > 0; }
  bool contains(const Dependency& d) const { return dependency_set_.count(d) > 0; }
  std::size_t size() const noexcept { return entities_.size() + dependencies_.size(); }
  bool empty() const noexcept { return size() == 0; }

  /// Set semantics: same entity keys and same dependency set.
  friend bool operator==(const KnowledgeGraph& a, const KnowledgeGraph& b) {
    return a.entity_keys_ == b.entity_keys_ && a.dependency_set_ == b.dependency_set_;
  }

 private:
  friend KnowledgeGraph validate_graph(std::vector<EntityLabel>, std::vector<Dependency>,
                                       Strictness, std::string);

  std::vector<EntityLabel> entities_;
  std::vector<Dependency> dependencies_;
  std::vector<std::string> warnings_;
  std::string key_knowledge_;
  std::set<std::string> entity_keys_;
  std::set<Dependency> dependency_set_;
};

/// Builds a graph that satisfies closure and uniqueness.
/// Strict: dangling references throw DanglingReference, duplicate dependencies
/// throw DuplicateDependency. Lenient: referenced-but-undeclared entities are
/// appended and duplicate dependencies dropped, each recorded as a warning.
/// Duplicate entities throw DuplicateEntity in both modes.
KnowledgeGraph validate_graph(std::vector<EntityLabel> entities,
                              std::vector<Dependency> dependencies,
                              Strictness strictness = Strictness::Strict,
                              std::string key_knowledge = {});

struct DependencyVerdict {
  bool present = false;
  std::string reason;
  friend bool operator==(const DependencyVerdict&, const DependencyVerdict&) = default;
};

inline constexpr std::string_view kMissingFromResponse = "missing from response";

struct GroundingVerdicts {
  std::map<EntityLabel, bool> entity_verdicts;
  std::map<Dependency, DependencyVerdict> dependency_verdicts;

  friend bool operator==(const GroundingVerdicts&, const GroundingVerdicts&) = default;
};

/// Fills every reference item the verdicts do not mention with false
/// ("missing from response"). Throws VerdictKeyMismatch for keys not in `ref`.
GroundingVerdicts complete_verdicts(const KnowledgeGraph& ref, GroundingVerdicts verdicts);

/// Verdicts marking every reference item as present.
GroundingVerdicts all_present(const KnowledgeGraph& ref);

}  // namespace kgeval
