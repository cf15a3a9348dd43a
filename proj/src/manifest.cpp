#include "kgeval/manifest.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>

#include "kgeval/io.hpp"
#include "kgeval/kg_dsl.hpp"

namespace kgeval {

namespace {

using json = nlohmann::json;

std::string fold_token(std::string_view text) {
  std::string out;
  for (unsigned char c : text) {
    if (c == '-' || c == '_' || c == ' ') continue;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

const std::string& required_string(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_string()) {
    throw Error(ErrorCode::MalformedLine, std::string("missing string field \"") + field + "\"");
  }
  return it->get_ref<const std::string&>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_absolute() || base.empty()) return path;
  return base / path;
}

}  // namespace

std::string_view to_string(EducationLevel level) {
  switch (level) {
    case EducationLevel::Preschool: return "preschool";
    case EducationLevel::Primary: return "primary";
    case EducationLevel::Secondary: return "secondary";
    case EducationLevel::High: return "high";
    case EducationLevel::Undergraduate: return "undergraduate";
    case EducationLevel::Phd: return "phd";
  }
  return "";
}

std::string_view column_title(EducationLevel level) {
  switch (level) {
    case EducationLevel::Preschool: return "Preschool";
    case EducationLevel::Primary: return "Primary";
    case EducationLevel::Secondary: return "Secondary";
    case EducationLevel::High: return "High";
    case EducationLevel::Undergraduate: return "Undergrad";
    case EducationLevel::Phd: return "PhD";
  }
  return "";
}

std::string_view to_string(Discipline discipline) {
  switch (discipline) {
    case Discipline::Biology: return "biology";
    case Discipline::Chemistry: return "chemistry";
    case Discipline::Economics: return "economics";
    case Discipline::Engineering: return "engineering";
    case Discipline::Geography: return "geography";
    case Discipline::History: return "history";
    case Discipline::Literature: return "literature";
    case Discipline::Math: return "math";
    case Discipline::Philosophy: return "philosophy";
    case Discipline::Sociology: return "sociology";
  }
  return "";
}

std::string_view column_title(Discipline discipline) {
  switch (discipline) {
    case Discipline::Biology: return "Biology";
    case Discipline::Chemistry: return "Chemistry";
    case Discipline::Economics: return "Economics";
    case Discipline::Engineering: return "Engineering";
    case Discipline::Geography: return "Geography";
    case Discipline::History: return "History";
    case Discipline::Literature: return "Literature";
    case Discipline::Math: return "Math";
    case Discipline::Philosophy: return "Philosophy";
    case Discipline::Sociology: return "Sociology";
  }
  return "";
}

std::optional<EducationLevel> education_level_from_string(std::string_view text) {
  std::string t = fold_token(text);
  if (t == "preschool") return EducationLevel::Preschool;
  if (t == "primary" || t == "primaryschool") return EducationLevel::Primary;
  if (t == "secondary" || t == "secondaryschool") return EducationLevel::Secondary;
  if (t == "high" || t == "highschool") return EducationLevel::High;
  if (t == "undergraduate" || t == "undergrad") return EducationLevel::Undergraduate;
  if (t == "phd") return EducationLevel::Phd;
  return std::nullopt;
}

std::optional<Discipline> discipline_from_string(std::string_view text) {
  std::string t = fold_token(text);
  if (t == "mathematics" || t == "maths") return Discipline::Math;
  for (Discipline d : kAllDisciplines) {
    if (t == to_string(d)) return d;
  }
  return std::nullopt;
}

ManifestItem parse_manifest_item(std::string_view json_text, const ManifestOptions& options) {
  json obj;
  try {
    obj = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedLine, e.what());
  }
  if (!obj.is_object()) throw Error(ErrorCode::MalformedLine, "record must be a JSON object");

  ManifestItem item;
  item.id = required_string(obj, "id");
  if (item.id.empty()) throw Error(ErrorCode::MalformedLine, "empty id");
  item.prompt = required_string(obj, "prompt");

  const std::string& level = required_string(obj, "education_level");
  auto parsed_level = education_level_from_string(level);
  if (!parsed_level) throw Error(ErrorCode::InvalidLevel, "unknown education level '" + level + "'");
  item.education_level = *parsed_level;

  const std::string& discipline = required_string(obj, "discipline");
  auto parsed_discipline = discipline_from_string(discipline);
  if (!parsed_discipline) {
    throw Error(ErrorCode::InvalidDiscipline, "unknown discipline '" + discipline + "'");
  }
  item.discipline = *parsed_discipline;

  auto kg = obj.find("kg");
  if (kg == obj.end()) throw Error(ErrorCode::MalformedLine, "missing field \"kg\"");
  if (kg->is_string()) {
    item.kg = parse_kg_json(read_file(resolve(options.base_dir, kg->get<std::string>())),
                            options.kg_strictness);
  } else if (kg->is_object()) {
    item.kg = parse_kg_json(kg->dump(), options.kg_strictness);
  } else {
    throw Error(ErrorCode::MalformedLine, "\"kg\" must be an object or a path");
  }

  item.generated_image_path = resolve(options.base_dir, required_string(obj, "generated_image_path"));
  if (auto it = obj.find("reference_image_path"); it != obj.end() && it->is_string()) {
    item.reference_image_path = resolve(options.base_dir, it->get<std::string>());
  }
  if (auto it = obj.find("regions_path"); it != obj.end() && it->is_string()) {
    item.regions_path = resolve(options.base_dir, it->get<std::string>());
  } else {
    item.regions_path = item.generated_image_path;
    item.regions_path += ".regions.json";
  }
  if (auto it = obj.find("model"); it != obj.end() && it->is_string() && !it->get_ref<const std::string&>().empty()) {
    item.model = it->get<std::string>();
  }
  return item;
}

ManifestParseResult parse_manifest(std::string_view bytes, const ManifestOptions& options) {
  ManifestParseResult result;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= bytes.size()) {
    std::size_t end = bytes.find('\n', start);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view line = bytes.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    try {
      result.items.push_back(parse_manifest_item(line, options));
    } catch (const Error& e) {
      if (options.mode == ManifestMode::FailFast) throw Error(e.code(), e.detail(), line_no);
      result.errors.push_back({line_no, e.code(), e.detail()});
    }
  }
  return result;
}

ManifestParseResult load_manifest(const std::filesystem::path& path, ManifestOptions options) {
  if (options.base_dir.empty()) options.base_dir = path.parent_path();
  return parse_manifest(read_file(path), options);
}

}  // namespace kgeval
