/**
 * @file backends.hpp
 * @brief Concrete encoder backends.
 *
 * - MockBackend: keyed-hash embeddings, useful as a null model.
 * - PlantedBackend: captions and frames of a matching video land near a
 *   shared anchor, so retrieval has a known correct answer.
 * - StoreBackend: looks up precomputed vectors in an EmbeddingStore.
 * - ExternalBackend: talks to an encoder process over stdin/stdout.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fdaclip/embedding_store.hpp"
#include "fdaclip/encode.hpp"

namespace fdaclip::encode {

/**
 * 64-bit FNV-1a over (seed as 8 little-endian bytes, domain byte, payload).
 * Domain bytes: 'F' frame, 'T' text, 'N' planted noise.
 */
class KeyedHash {
 public:
  KeyedHash(std::uint64_t seed, char domain);
  KeyedHash& update(std::span<const std::uint8_t> bytes);
  KeyedHash& update_u64(std::uint64_t v);  // 8 bytes, little-endian
  [[nodiscard]] std::uint64_t digest() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

std::uint64_t splitmix64(std::uint64_t x);

/**
 * Deterministic unit vector: component k is splitmix64(digest + (k+1) *
 * 0x9E3779B97F4A7C15) mapped to [-1, 1) via its top 53 bits, then the whole
 * vector is L2-normalised in double precision.
 */
std::vector<double> unit_vector_from_digest(std::uint64_t digest, std::size_t dim);

class MockBackend final : public EncoderBackend {
 public:
  MockBackend(std::uint64_t seed, std::size_t dim);

  Embedding encode_frame(const FrameInput& input) override;
  Embedding encode_text(const TextInput& input) override;
  [[nodiscard]] std::size_t dim() const override { return dim_; }

 private:
  std::uint64_t seed_;
  std::size_t dim_;
};

/**
 * Anchors are orthonormal (Gram-Schmidt over seeded vectors), one per
 * distinct video id in the correspondence map, so at most dim videos fit.
 * Output: normalize(anchor + noise * u) with u a hash-derived unit vector.
 */
class PlantedBackend final : public EncoderBackend {
 public:
  /// @p caption_to_video maps each caption string to the id of its video.
  PlantedBackend(std::map<std::string, std::string> caption_to_video, std::size_t dim, double noise,
                 std::uint64_t seed = 0);

  Embedding encode_frame(const FrameInput& input) override;
  Embedding encode_text(const TextInput& input) override;
  [[nodiscard]] std::size_t dim() const override { return dim_; }

  [[nodiscard]] const std::vector<float>& anchor(const std::string& video_id) const;

 private:
  Embedding perturb(const std::vector<float>& anchor, std::uint64_t digest) const;

  std::map<std::string, std::string> caption_to_video_;
  std::map<std::string, std::vector<float>> anchors_;
  std::size_t dim_;
  double noise_;
  std::uint64_t seed_;
};

/// Record ids looked up by StoreBackend.
std::string frame_record_id(std::string_view video_id, std::size_t frame_index);
std::string text_record_id(std::string_view video_id, std::size_t caption_index);

class StoreBackend final : public EncoderBackend {
 public:
  explicit StoreBackend(EmbeddingStore store);

  Embedding encode_frame(const FrameInput& input) override;
  Embedding encode_text(const TextInput& input) override;
  [[nodiscard]] std::size_t dim() const override { return store_.dim(); }

 private:
  Embedding lookup(const std::string& id) const;

  EmbeddingStore store_;
};

/**
 * Line protocol with a child process started via /bin/sh -c. Each request is
 * one JSON object on the child's stdin:
 *
 *     {"type":"frame","rgb_path":"...","mask_path":"..."}
 *     {"type":"text","text":"..."}
 *
 * and each reply one JSON array of dim numbers on its stdout. Masks (and
 * frames that have no source file) are written as P5/P6 files under
 * @p scratch_dir. Not safe for concurrent calls.
 */
class ExternalBackend final : public EncoderBackend {
 public:
  ExternalBackend(const std::string& command, std::size_t dim, std::filesystem::path scratch_dir);
  ~ExternalBackend() override;
  ExternalBackend(const ExternalBackend&) = delete;
  ExternalBackend& operator=(const ExternalBackend&) = delete;

  Embedding encode_frame(const FrameInput& input) override;
  Embedding encode_text(const TextInput& input) override;
  [[nodiscard]] std::size_t dim() const override { return dim_; }
  [[nodiscard]] bool concurrent() const override { return false; }

 private:
  Embedding round_trip(const std::string& request_line);

  std::size_t dim_;
  std::filesystem::path scratch_dir_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string pending_;
};

}  // namespace fdaclip::encode
