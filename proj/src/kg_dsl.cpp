#include "kgeval/kg_dsl.hpp"

#include <json.hpp>

#include <vector>

#include "kgeval/error.hpp"

namespace kgeval {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

void check_balanced(std::string_view text) {
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')' && --depth < 0) break;
  }
  if (depth != 0) throw Error(ErrorCode::UnbalancedParens, "unbalanced parentheses");
}

// Position of the ')' matching the '(' at `open`. Input is known to be balanced.
std::size_t matching_paren(std::string_view text, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < text.size(); ++i) {
    if (text[i] == '(') ++depth;
    if (text[i] == ')' && --depth == 0) return i;
  }
  return std::string_view::npos;
}

Term parse_term(std::string_view raw) {
  std::string_view text = trim(raw);
  std::size_t open = text.find('(');
  if (open == std::string_view::npos) {
    if (text.find(',') != std::string_view::npos) {
      throw Error(ErrorCode::ArityError, "labels cannot contain commas");
    }
    return Term{EntityLabel(text), std::nullopt};
  }
  std::size_t close = matching_paren(text, open);
  if (close + 1 != text.size()) {
    throw Error(ErrorCode::ArityError, "unexpected text after modifier term");
  }
  std::string_view inner = text.substr(open + 1, close - open - 1);
  if (inner.find('(') != std::string_view::npos) {
    throw Error(ErrorCode::NestingTooDeep, "modifiers may wrap a plain label only");
  }
  if (inner.find(',') != std::string_view::npos) {
    throw Error(ErrorCode::ArityError, "modifier takes exactly one label");
  }
  Modifier modifier(trim(text.substr(0, open)));
  return Term{EntityLabel(inner), std::move(modifier)};
}

}  // namespace

Dependency parse_dependency(std::string_view input) {
  std::string_view text = trim(input);
  check_balanced(text);

  std::size_t open = text.find('(');
  std::string_view name = trim(text.substr(0, open));
  auto kind = predicate_from_string(name);
  if (!kind) throw Error(ErrorCode::UnknownPredicate, "unknown predicate '" + std::string(name) + "'");
  if (open == std::string_view::npos) {
    throw Error(ErrorCode::ArityError, std::string(name) + " needs two arguments");
  }

  std::size_t close = matching_paren(text, open);
  if (close + 1 != text.size()) {
    throw Error(ErrorCode::ArityError, "unexpected text after argument list");
  }
  std::string_view args = text.substr(open + 1, close - open - 1);

  std::vector<std::string_view> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < args.size(); ++i) {
    char c = args[i];
    if (c == '(') ++depth;
    else if (c == ')') --depth;
    else if (c == ',' && depth == 0) {
      parts.push_back(args.substr(start, i - start));
      start = i + 1;
    }
  }
  parts.push_back(args.substr(start));
  if (parts.size() != 2) {
    throw Error(ErrorCode::ArityError, std::string(to_string(*kind)) + " takes 2 arguments, got " +
                                           std::to_string(parts.size()));
  }
  return Dependency{*kind, parse_term(parts[0]), parse_term(parts[1])};
}

std::string serialize_term(const Term& term) {
  if (!term.modifier) return term.entity.display();
  return term.modifier->name() + "(" + term.entity.display() + ")";
}

std::string serialize_dependency(const Dependency& dep) {
  std::string out(to_string(dep.kind));
  out += '(';
  out += serialize_term(dep.left);
  out += ", ";
  out += serialize_term(dep.right);
  out += ')';
  return out;
}

KnowledgeGraph parse_kg_json(std::string_view bytes, Strictness strictness) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(bytes.begin(), bytes.end());
  } catch (const ordered_json::parse_error& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::MalformedJson, "top level must be an object");
  auto vc = doc.find("Visual Components");
  if (vc == doc.end() || !vc->is_object()) {
    throw Error(ErrorCode::MalformedJson, "missing \"Visual Components\" object");
  }
  auto elements = vc->find("elements");
  if (elements == vc->end() || !elements->is_array()) {
    throw Error(ErrorCode::MalformedJson, "\"elements\" must be an array");
  }

  std::vector<EntityLabel> entities;
  for (std::size_t i = 0; i < elements->size(); ++i) {
    const auto& el = (*elements)[i];
    if (!el.is_string()) throw Error(ErrorCode::MalformedJson, "element is not a string", i);
    try {
      entities.emplace_back(el.get_ref<const std::string&>());
    } catch (const Error& e) {
      throw Error(e.code(), "elements[" + std::to_string(i) + "]: " + e.detail(), i);
    }
  }

  std::vector<Dependency> deps;
  if (auto dj = vc->find("dependencies"); dj != vc->end() && !dj->is_null()) {
    if (!dj->is_array()) throw Error(ErrorCode::MalformedJson, "\"dependencies\" must be an array");
    for (std::size_t i = 0; i < dj->size(); ++i) {
      const auto& d = (*dj)[i];
      if (!d.is_string()) throw Error(ErrorCode::MalformedJson, "dependency is not a string", i);
      try {
        deps.push_back(parse_dependency(d.get_ref<const std::string&>()));
      } catch (const Error& e) {
        throw Error(e.code(), "dependencies[" + std::to_string(i) + "]: " + e.detail(), i);
      }
    }
  }

  std::string key_knowledge;
  if (auto kk = doc.find("Key Knowledge"); kk != doc.end()) key_knowledge = kk->dump();

  try {
    return validate_graph(std::move(entities), std::move(deps), strictness, std::move(key_knowledge));
  } catch (const Error& e) {
    if (e.position()) {
      throw Error(e.code(), "dependencies[" + std::to_string(*e.position()) + "]: " + e.detail(),
                  e.position());
    }
    throw;
  }
}

std::string serialize_kg_json(const KnowledgeGraph& graph) {
  ordered_json vc = ordered_json::object();
  vc["elements"] = ordered_json::array();
  for (const auto& e : graph.entities()) vc["elements"].push_back(e.display());
  vc["dependencies"] = ordered_json::array();
  for (const auto& d : graph.dependencies()) vc["dependencies"].push_back(serialize_dependency(d));

  ordered_json doc = ordered_json::object();
  doc["Visual Components"] = std::move(vc);
  if (!graph.key_knowledge().empty()) doc["Key Knowledge"] = ordered_json::parse(graph.key_knowledge());
  return doc.dump(2) + "\n";
}

}  // namespace kgeval
