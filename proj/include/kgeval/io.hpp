#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace kgeval {

/// Whole-file read; throws Error{Io} when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes via a sibling temp file and rename so readers never see partial output.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace kgeval
