/**
 * @file embedding_store.cpp
 * @brief FDAE binary format.
 */
#include "fdaclip/embedding_store.hpp"

#include <bit>
#include <cstring>
#include <limits>

#include "fdaclip/fileio.hpp"

namespace fdaclip::encode {

namespace {

template <class T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

class Cursor {
 public:
  explicit Cursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <class T>
  T get_le(const char* what) {
    need(sizeof(T), what);
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(T{bytes_[pos_ + i]} << (8 * i));
    pos_ += sizeof(T);
    return value;
  }

  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  [[nodiscard]] std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) throw FormatError(std::string("embedding store truncated while reading ") + what);
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void EmbeddingStore::add(std::string id, std::vector<float> values) {
  if (values.size() != dim_) {
    throw DataError("record '" + id + "' has dimension " + std::to_string(values.size()) + ", store expects " +
                    std::to_string(dim_));
  }
  if (id.size() > std::numeric_limits<std::uint16_t>::max()) throw DataError("record id longer than 65535 bytes");
  if (index_.contains(id)) throw DataError("duplicate record id '" + id + "'");
  index_.emplace(id, records_.size());
  records_.push_back({std::move(id), std::move(values)});
}

const std::vector<float>* EmbeddingStore::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &records_[it->second].values;
}

std::vector<std::uint8_t> EmbeddingStore::serialize() const {
  std::vector<std::uint8_t> out(std::begin(kStoreMagic), std::end(kStoreMagic));
  put_le<std::uint16_t>(out, kStoreVersion);
  put_le<std::uint32_t>(out, dim_);
  if (records_.size() > std::numeric_limits<std::uint32_t>::max()) throw DataError("too many records");
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(records_.size()));
  std::unordered_map<std::string_view, int> seen;
  for (const auto& r : records_) {
    if (r.values.size() != dim_) {
      throw DataError("record '" + r.id + "' has dimension " + std::to_string(r.values.size()) +
                      ", store expects " + std::to_string(dim_));
    }
    if (r.id.size() > std::numeric_limits<std::uint16_t>::max()) throw DataError("record id longer than 65535 bytes");
    if (seen[r.id]++) throw DataError("duplicate record id '" + r.id + "'");
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(r.id.size()));
    out.insert(out.end(), r.id.begin(), r.id.end());
    for (float v : r.values) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

EmbeddingStore EmbeddingStore::deserialize(std::span<const std::uint8_t> bytes) {
  Cursor cur(bytes);
  auto magic = cur.take(4, "magic");
  if (std::memcmp(magic.data(), kStoreMagic, 4) != 0) throw FormatError("embedding store: bad magic");
  auto version = cur.get_le<std::uint16_t>("version");
  if (version != kStoreVersion) {
    throw FormatError("embedding store: unsupported version " + std::to_string(version));
  }
  auto dim = cur.get_le<std::uint32_t>("dim");
  auto count = cur.get_le<std::uint32_t>("record count");
  EmbeddingStore store(dim);
  for (std::uint32_t i = 0; i < count; ++i) {
    auto id_len = cur.get_le<std::uint16_t>("id length");
    auto id_bytes = cur.take(id_len, "id");
    std::string id(id_bytes.begin(), id_bytes.end());
    std::vector<float> values(dim);
    for (auto& v : values) v = std::bit_cast<float>(cur.get_le<std::uint32_t>("vector"));
    try {
      store.add(std::move(id), std::move(values));
    } catch (const DataError& e) {
      throw FormatError(std::string("embedding store: ") + e.what());
    }
  }
  if (cur.remaining() != 0) throw FormatError("embedding store: trailing bytes after last record");
  return store;
}

EmbeddingStore make_store_unchecked(std::uint32_t dim, std::vector<EmbeddingStore::Record> records) {
  EmbeddingStore store(dim);
  store.records_ = std::move(records);
  return store;
}

void save_embedding_store(const EmbeddingStore& store, const std::filesystem::path& path) {
  io::write_atomic(path, store.serialize());
}

EmbeddingStore load_embedding_store(const std::filesystem::path& path) {
  try {
    return EmbeddingStore::deserialize(io::read_bytes(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace fdaclip::encode
