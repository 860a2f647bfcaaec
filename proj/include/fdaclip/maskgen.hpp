/**
 * @file maskgen.hpp
 * @brief Dynamic-region masks from frame differences.
 *
 * Pipeline per frame pair: absolute difference, threshold, then
 * closing -> opening -> median -> small-component removal.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fdaclip/image.hpp"

namespace fdaclip::maskgen {

enum class Connectivity : int { Four = 4, Eight = 8 };

struct MaskConfig {
  int tau = 25;
  std::size_t close_kernel = 5;
  std::size_t open_kernel = 3;
  std::size_t median_kernel = 3;
  std::size_t min_area = 50;
  Connectivity connectivity = Connectivity::Eight;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// Converts 4/8 to Connectivity; anything else throws std::invalid_argument.
Connectivity connectivity_from_int(int value);

DiffMap frame_diff(const GrayFrame& prev, const GrayFrame& cur);

/// 255 where diff > tau, 0 elsewhere. tau == 0 yields an all-white mask.
BinaryMask binarize(const DiffMap& diff, int tau);

/**
 * Square structuring element of side @p kernel_side (odd). The image is
 * embedded in an infinite background plane: erosion sees 0 beyond the
 * border, and closing keeps the dilated pixels that fall outside the frame
 * for its erosion step, so closing is extensive and opening anti-extensive.
 */
BinaryMask dilate(const BinaryMask& mask, std::size_t kernel_side);
BinaryMask erode(const BinaryMask& mask, std::size_t kernel_side);
BinaryMask morph_close(const BinaryMask& mask, std::size_t kernel_side);
BinaryMask morph_open(const BinaryMask& mask, std::size_t kernel_side);

/// Majority vote over the window; border pixels are replicated.
BinaryMask median_filter(const BinaryMask& mask, std::size_t kernel_side);

/// Per-pixel component label (0 = background, 1.. = component id) plus areas.
struct ComponentLabels {
  std::vector<std::uint32_t> labels;
  std::vector<std::size_t> areas;  // areas[id - 1]
};
ComponentLabels label_components(const BinaryMask& mask, Connectivity connectivity);

/// Clears every white component smaller than @p min_area pixels.
BinaryMask filter_components(const BinaryMask& mask, std::size_t min_area, Connectivity connectivity);

/// close -> open -> median -> component filter.
BinaryMask postprocess(const BinaryMask& mask, const MaskConfig& config);

/**
 * One mask per frame. Mask t (t >= 1) comes from the diff of frames t-1 and
 * t; frame 0 reuses mask 1. A single frame, or tau == 0, gives all-white
 * masks (no post-processing is applied in the tau == 0 case).
 */
std::vector<BinaryMask> generate_masks(const std::vector<GrayFrame>& frames, const MaskConfig& config);

/// Nearest-neighbour resampling: source pixel floor(x * w_in / w_out).
BinaryMask resize_mask(const BinaryMask& mask, std::size_t out_width, std::size_t out_height);

}  // namespace fdaclip::maskgen
