#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace stgnn {

std::string read_file(const std::filesystem::path& path);

/// Writes `content` to a sibling temp file and renames it over `path`,
/// so readers never observe a partially written file.
void atomic_write(const std::filesystem::path& path, std::string_view content);

} // namespace stgnn
