#pragma once
// Benchmark manifests: newline-delimited JSON, one item per line.
//
//   {"id": "bio-001", "prompt": "...", "education_level": "high",
//    "discipline": "biology", "kg": {<knowledge-graph JSON>} | "path/to/kg.json",
//    "generated_image_path": "img/bio-001.png",
//    "reference_image_path": "ref/bio-001.png",   (optional)
//    "regions_path": "img/bio-001.regions.json",   (optional)
//    "model": "GPT-4o"}                            (optional)
//
// Relative paths resolve against the manifest's directory. Unknown fields are
// ignored. Blank lines are skipped.

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgeval/error.hpp"
#include "kgeval/kg_model.hpp"

namespace kgeval {

enum class EducationLevel { Preschool, Primary, Secondary, High, Undergraduate, Phd };
enum class Discipline {
  Biology, Chemistry, Economics, Engineering, Geography,
  History, Literature, Math, Philosophy, Sociology,
};

inline constexpr std::array<EducationLevel, 6> kAllLevels = {
    EducationLevel::Preschool, EducationLevel::Primary,       EducationLevel::Secondary,
    EducationLevel::High,      EducationLevel::Undergraduate, EducationLevel::Phd};

inline constexpr std::array<Discipline, 10> kAllDisciplines = {
    Discipline::Biology,    Discipline::Chemistry, Discipline::Economics, Discipline::Engineering,
    Discipline::Geography,  Discipline::History,   Discipline::Literature, Discipline::Math,
    Discipline::Philosophy, Discipline::Sociology};

/// Canonical manifest token ("preschool", "phd", ...).
std::string_view to_string(EducationLevel level);
/// Table column title ("Preschool", "Undergrad", "PhD", ...).
std::string_view column_title(EducationLevel level);
std::string_view to_string(Discipline discipline);
std::string_view column_title(Discipline discipline);

/// Accepts the canonical token plus common spellings ("pre-school",
/// "high school", "PhD"); nullopt otherwise.
std::optional<EducationLevel> education_level_from_string(std::string_view text);
std::optional<Discipline> discipline_from_string(std::string_view text);

struct ManifestItem {
  std::string id;
  std::string prompt;
  EducationLevel education_level = EducationLevel::Preschool;
  Discipline discipline = Discipline::Biology;
  KnowledgeGraph kg;
  std::optional<std::filesystem::path> reference_image_path;
  std::filesystem::path generated_image_path;
  /// Defaults to generated_image_path with ".regions.json" appended.
  std::filesystem::path regions_path;
  /// Name of the image generator the item belongs to; "unknown" if not given.
  std::string model = "unknown";
};

struct ManifestLineError {
  std::size_t line = 0;  // 1-based
  ErrorCode code = ErrorCode::MalformedLine;
  std::string message;
};

struct ManifestParseResult {
  std::vector<ManifestItem> items;
  std::vector<ManifestLineError> errors;
};

enum class ManifestMode {
  FailFast,  // throw on the first bad line (position = line number)
  Partial,   // collect per-line errors and keep the good items
};

struct ManifestOptions {
  ManifestMode mode = ManifestMode::FailFast;
  Strictness kg_strictness = Strictness::Strict;
  std::filesystem::path base_dir;
};

ManifestParseResult parse_manifest(std::string_view bytes, const ManifestOptions& options = {});

/// Parses a single manifest record (one line's JSON object).
ManifestItem parse_manifest_item(std::string_view json_text, const ManifestOptions& options = {});

/// Reads and parses a manifest file; base_dir defaults to the file's directory.
ManifestParseResult load_manifest(const std::filesystem::path& path, ManifestOptions options = {});

}  // namespace kgeval
