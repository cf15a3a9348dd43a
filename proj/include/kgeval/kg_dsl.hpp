#pragma once
// Text forms of knowledge graphs.
//
// Dependency grammar (whitespace tolerated around every token):
//
//   dep   := KIND '(' term ',' term ')'
//   term  := LABEL | IDENT '(' LABEL ')'
//   LABEL := any text without ',', '(' or ')'
//
// KIND is one of the six predicate names (case-insensitive on input, canonical
// on output). Commas inside labels are not supported.

#include <string>
#include <string_view>

#include "kgeval/kg_model.hpp"

namespace kgeval {

/// Throws Error with code UnknownPredicate, ArityError, NestingTooDeep,
/// UnbalancedParens, EmptyLabel, InvalidModifier or InvalidUtf8. Never throws
/// anything else, whatever the input bytes.
Dependency parse_dependency(std::string_view text);

/// "label" or "modifier(label)" using the display spelling.
std::string serialize_term(const Term& term);

/// Canonical "Kind(left, right)".
std::string serialize_dependency(const Dependency& dep);

/// Reads the knowledge-graph JSON document:
///   {"Visual Components": {"elements": [...], "dependencies": ["Kind(a, b)", ...]},
///    "Key Knowledge": {...}}
/// "Key Knowledge" is optional and retained verbatim. Dependency parse errors
/// carry the array index as their position.
KnowledgeGraph parse_kg_json(std::string_view bytes, Strictness strictness = Strictness::Strict);

/// Inverse of parse_kg_json (pretty-printed, 2-space indent).
std::string serialize_kg_json(const KnowledgeGraph& graph);

}  // namespace kgeval
