#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace voxgs {

// Both throw IoError naming the path.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

// Writes to a sibling temporary and renames it over `path`, so readers
// never observe a partial file. The temporary is removed on failure.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace voxgs
