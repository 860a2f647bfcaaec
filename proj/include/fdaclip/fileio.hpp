/**
 * @file fileio.hpp
 * @brief Small whole-file helpers.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace fdaclip::io {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over @p path, so readers
/// never observe a partially written file.
void write_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace fdaclip::io
