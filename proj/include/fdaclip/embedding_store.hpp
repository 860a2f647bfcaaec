/**
 * @file embedding_store.hpp
 * @brief Named float vectors with a fixed dimension, plus their file format.
 *
 * Layout (all integers and floats little-endian):
 *
 *     "FDAE"  u16 version (=1)  u32 dim  u32 record_count
 *     record_count x { u16 id_len, id bytes (UTF-8), dim x f32 }
 *
 * Trailing bytes after the last record are rejected.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fdaclip/error.hpp"

namespace fdaclip::encode {

inline constexpr char kStoreMagic[4] = {'F', 'D', 'A', 'E'};
inline constexpr std::uint16_t kStoreVersion = 1;

class EmbeddingStore {
 public:
  struct Record {
    std::string id;
    std::vector<float> values;
  };

  explicit EmbeddingStore(std::uint32_t dim = 0) : dim_(dim) {}

  /// Rejects a dimension mismatch (DataError) or a duplicate id (DataError).
  void add(std::string id, std::vector<float> values);

  [[nodiscard]] std::uint32_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }
  [[nodiscard]] const std::vector<Record>& records() const noexcept { return records_; }
  [[nodiscard]] const std::vector<float>* find(std::string_view id) const;

  /// Re-checks every record against the header dimension before encoding.
  [[nodiscard]] std::vector<std::uint8_t> serialize() const;
  static EmbeddingStore deserialize(std::span<const std::uint8_t> bytes);

 private:
  friend EmbeddingStore make_store_unchecked(std::uint32_t, std::vector<Record>);

  std::uint32_t dim_;
  std::vector<Record> records_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Builds a store without validation; test-only escape hatch for exercising save-time checks.
EmbeddingStore make_store_unchecked(std::uint32_t dim, std::vector<EmbeddingStore::Record> records);

void save_embedding_store(const EmbeddingStore& store, const std::filesystem::path& path);
EmbeddingStore load_embedding_store(const std::filesystem::path& path);

}  // namespace fdaclip::encode
