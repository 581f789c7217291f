#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace gaius {

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file, fsyncs, then renames over the target so a
// reader never observes a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

// Lowercase hex SHA-256 of the bytes.
std::string content_id(std::string_view bytes);

}  // namespace gaius
