/**
 * @file image.hpp
 * @brief 8-bit raster containers used throughout the pipeline.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fdaclip/error.hpp"

namespace fdaclip {

struct RgbTag {
  static constexpr std::size_t channels = 3;
  static constexpr bool binary = false;
};
struct GrayTag {
  static constexpr std::size_t channels = 1;
  static constexpr bool binary = false;
};
struct DiffTag {
  static constexpr std::size_t channels = 1;
  static constexpr bool binary = false;
};
struct MaskTag {
  static constexpr std::size_t channels = 1;
  static constexpr bool binary = true;
};

/**
 * @brief Row-major interleaved 8-bit raster.
 *
 * The tag distinguishes semantically different single-channel rasters
 * (luma, difference map, binary mask) so they cannot be mixed up silently.
 * Mask rasters reject any value other than 0 and 255 on construction.
 */
template <class Tag>
class Raster {
 public:
  static constexpr std::size_t kChannels = Tag::channels;

  Raster() = default;

  Raster(std::size_t width, std::size_t height, std::uint8_t fill = 0)
      : width_(width), height_(height), data_(checked_size(width, height), fill) {
    if constexpr (Tag::binary) {
      if (fill != 0 && fill != 255) throw std::invalid_argument("mask fill must be 0 or 255");
    }
  }

  Raster(std::size_t width, std::size_t height, std::vector<std::uint8_t> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != checked_size(width, height)) {
      throw DataError("raster buffer holds " + std::to_string(data_.size()) + " bytes, expected " +
                      std::to_string(width * height * kChannels));
    }
    if constexpr (Tag::binary) {
      for (auto v : data_) {
        if (v != 0 && v != 255) throw DataError("binary mask contains value " + std::to_string(v));
      }
    }
  }

  [[nodiscard]] std::size_t width() const noexcept { return width_; }
  [[nodiscard]] std::size_t height() const noexcept { return height_; }
  [[nodiscard]] std::size_t pixel_count() const noexcept { return width_ * height_; }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  [[nodiscard]] std::span<const std::uint8_t> data() const noexcept { return data_; }
  [[nodiscard]] std::span<std::uint8_t> data() noexcept { return data_; }

  [[nodiscard]] std::uint8_t at(std::size_t x, std::size_t y, std::size_t c = 0) const {
    return data_[(y * width_ + x) * kChannels + c];
  }
  std::uint8_t& at(std::size_t x, std::size_t y, std::size_t c = 0) {
    return data_[(y * width_ + x) * kChannels + c];
  }

  [[nodiscard]] bool same_shape(const Raster& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }
  template <class OtherTag>
  [[nodiscard]] bool same_shape(const Raster<OtherTag>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Raster& a, const Raster& b) = default;

 private:
  static std::size_t checked_size(std::size_t width, std::size_t height) {
    if (width == 0 || height == 0) throw DataError("raster dimensions must be at least 1x1");
    return width * height * kChannels;
  }

  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> data_;
};

using RgbFrame = Raster<RgbTag>;
using GrayFrame = Raster<GrayTag>;
using DiffMap = Raster<DiffTag>;
using BinaryMask = Raster<MaskTag>;

/// Fraction of mask pixels that are 255.
[[nodiscard]] double white_fraction(const BinaryMask& mask);

}  // namespace fdaclip
