/**
 * @file pnm.hpp
 * @brief Binary portable graymap / pixmap (P5 / P6) reading and writing.
 *
 * Only maxval 255 is accepted. Header comments ('#' to end of line) are
 * skipped; exactly one whitespace byte separates the maxval from the raster.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fdaclip/image.hpp"

namespace fdaclip::pnm {

struct DecodedImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 0;  // 1 for P5, 3 for P6
  std::vector<std::uint8_t> pixels;
};

DecodedImage decode(std::span<const std::uint8_t> bytes);
DecodedImage read_file(const std::filesystem::path& path);

/// P6 files load as-is; P5 files are replicated into three equal channels.
RgbFrame read_rgb(const std::filesystem::path& path);
GrayFrame read_gray(const std::filesystem::path& path);
BinaryMask read_mask(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_gray(std::size_t width, std::size_t height,
                                      std::span<const std::uint8_t> pixels);
std::vector<std::uint8_t> encode_rgb(const RgbFrame& frame);

void write_gray(const std::filesystem::path& path, const GrayFrame& frame);
void write_mask(const std::filesystem::path& path, const BinaryMask& mask);
void write_rgb(const std::filesystem::path& path, const RgbFrame& frame);

}  // namespace fdaclip::pnm
