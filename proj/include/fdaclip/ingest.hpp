/**
 * @file ingest.hpp
 * @brief Frame sequence loading, uniform keyframe sampling and luma conversion.
 */
#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fdaclip/image.hpp"

namespace fdaclip::ingest {

/// Frame counts used when sampling clips for training and for evaluation.
inline constexpr std::size_t kTrainFrames = 6;
inline constexpr std::size_t kTestFrames = 12;

/// Ordered frames of one video. All frames share one size; never empty.
struct FrameSequence {
  std::string source_id;
  std::vector<RgbFrame> frames;
  /// Source file of each frame; empty for in-memory sequences.
  std::vector<std::filesystem::path> paths;
};

/// Checks the sequence invariants, throwing DataError on violation.
void validate(const FrameSequence& seq);

/**
 * Loads every file in @p dir whose name matches the shell glob @p pattern,
 * in byte-wise lexicographic filename order. Files must be P6 or P5 rasters
 * with maxval 255 and identical dimensions.
 */
FrameSequence load_frame_sequence(const std::filesystem::path& dir, std::string_view pattern,
                                  std::string source_id = {});

/**
 * min(n, total) strictly increasing indices; floor(i * total / n) when
 * total >= n, otherwise every index.
 */
std::vector<std::size_t> sample_uniform(std::size_t total_frames, std::size_t n);

/// Keeps only the frames at @p indices (must be valid and increasing).
FrameSequence select_frames(const FrameSequence& seq, const std::vector<std::size_t>& indices);

/// BT.601 luma, rounded half up.
GrayFrame to_grayscale(const RgbFrame& frame);

/// Replicates luma into three channels.
RgbFrame to_rgb(const GrayFrame& frame);

}  // namespace fdaclip::ingest
