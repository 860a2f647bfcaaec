/**
 * @file encode.hpp
 * @brief Embedding type, the frame/text encoder seam, and video pooling.
 *
 * Encoders receive an RGB frame together with its binary dynamic-region
 * mask (the extra alpha channel) and return one fixed-size feature vector.
 * Concrete backends live in backends.hpp.
 */
#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "fdaclip/image.hpp"

namespace fdaclip::encode {

inline constexpr std::size_t kDefaultDim = 512;

struct Embedding {
  std::vector<float> values;

  [[nodiscard]] std::size_t dim() const noexcept { return values.size(); }
  friend bool operator==(const Embedding&, const Embedding&) = default;
};

/// Throws DataError unless every component is finite.
void require_finite(const Embedding& e);

/// Frame-level request. rgb_path is the on-disk source of the frame when known.
struct FrameInput {
  const RgbFrame& rgb;
  const BinaryMask& mask;
  std::string_view video_id;
  std::size_t frame_index = 0;
  std::filesystem::path rgb_path;
};

struct TextInput {
  std::string_view caption;
  std::string_view video_id;
  std::size_t caption_index = 0;
};

class EncoderBackend {
 public:
  virtual ~EncoderBackend() = default;

  virtual Embedding encode_frame(const FrameInput& input) = 0;
  virtual Embedding encode_text(const TextInput& input) = 0;
  [[nodiscard]] virtual std::size_t dim() const = 0;

  /// Whether encode_* may be called from several threads at once.
  [[nodiscard]] virtual bool concurrent() const { return true; }
};

/// Elementwise mean, accumulated in double. Not normalised.
Embedding pool_average(std::span<const Embedding> frame_embeddings);

Embedding l2_normalize(const Embedding& v);

}  // namespace fdaclip::encode
