/**
 * @file synthetic.hpp
 * @brief Moving-square clips with a known changed-pixel set, and small
 * on-disk datasets built from them.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fdaclip/harness.hpp"
#include "fdaclip/image.hpp"

namespace fdaclip::synthetic {

struct MovingSquare {
  std::size_t width = 128;
  std::size_t height = 128;
  std::size_t frames = 16;
  std::size_t side = 16;
  int x0 = 8;
  int y0 = 56;
  int dx = 4;
  int dy = 0;
  std::uint8_t square_level = 220;
  /// Uniform integer noise in [-amplitude, amplitude], added per pixel per frame.
  int noise_amplitude = 10;
  std::uint64_t seed = 1;
};

struct Clip {
  std::vector<GrayFrame> clean;  // background + square, no noise
  std::vector<GrayFrame> noisy;
};

/// Static textured background in [40, 100], square drawn on top, clipped to the frame.
Clip make_moving_square(const MovingSquare& spec);

/// Pixels whose noise-free value differs between two frames.
BinaryMask changed_pixels(const GrayFrame& prev, const GrayFrame& cur);

double iou(const BinaryMask& a, const BinaryMask& b);

struct DatasetSpec {
  std::size_t videos = 8;
  std::size_t captions_per_video = 3;
  std::size_t frames = 16;
  std::size_t width = 64;
  std::size_t height = 64;
  std::size_t side = 12;
  int noise_amplitude = 8;
  std::uint64_t seed = 7;
};

/**
 * Writes <root>/frames/<video_id>/fNNN.ppm plus <root>/manifest.json.
 * Each video gets its own start position and direction. Returns the manifest path.
 */
std::filesystem::path write_dataset(const std::filesystem::path& root, const DatasetSpec& spec);

}  // namespace fdaclip::synthetic
