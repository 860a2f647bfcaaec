/**
 * @file pnm.cpp
 * @brief P5/P6 codec.
 */
#include "fdaclip/pnm.hpp"

#include <cctype>
#include <string>

#include "fdaclip/fileio.hpp"

namespace fdaclip::pnm {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t read_uint(const char* what) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw FormatError(std::string("PNM header: expected ") + what);
    }
    std::size_t value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1u << 24)) throw FormatError(std::string("PNM header: ") + what + " too large");
      ++pos_;
    }
    return value;
  }

  std::size_t pos() const { return pos_; }
  void advance() { ++pos_; }
  std::uint8_t peek() const { return bytes_[pos_]; }
  bool at_end() const { return pos_ >= bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> with_header(const char* magic, std::size_t width, std::size_t height,
                                      std::span<const std::uint8_t> pixels) {
  std::string header = std::string(magic) + "\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), pixels.begin(), pixels.end());
  return out;
}

}  // namespace

DecodedImage decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw FormatError("not a binary PGM/PPM (expected magic P5 or P6)");
  }
  DecodedImage img;
  img.channels = bytes[1] == '5' ? 1 : 3;
  HeaderReader reader(bytes.subspan(2));
  img.width = reader.read_uint("width");
  img.height = reader.read_uint("height");
  auto maxval = reader.read_uint("maxval");
  if (img.width == 0 || img.height == 0) throw FormatError("PNM header: zero dimension");
  if (maxval != 255) throw FormatError("PNM maxval must be 255, got " + std::to_string(maxval));
  if (reader.at_end() || !std::isspace(reader.peek())) throw FormatError("PNM header: missing raster separator");
  reader.advance();
  auto offset = 2 + reader.pos();
  auto expected = img.width * img.height * img.channels;
  if (bytes.size() - offset < expected) throw FormatError("PNM raster truncated");
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                    bytes.begin() + static_cast<std::ptrdiff_t>(offset + expected));
  return img;
}

DecodedImage read_file(const std::filesystem::path& path) {
  try {
    return decode(io::read_bytes(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

RgbFrame read_rgb(const std::filesystem::path& path) {
  auto img = read_file(path);
  if (img.channels == 3) return RgbFrame(img.width, img.height, std::move(img.pixels));
  std::vector<std::uint8_t> rgb;
  rgb.reserve(img.pixels.size() * 3);
  for (auto v : img.pixels) rgb.insert(rgb.end(), {v, v, v});
  return RgbFrame(img.width, img.height, std::move(rgb));
}

GrayFrame read_gray(const std::filesystem::path& path) {
  auto img = read_file(path);
  if (img.channels != 1) throw FormatError(path.string() + ": expected P5 graymap");
  return GrayFrame(img.width, img.height, std::move(img.pixels));
}

BinaryMask read_mask(const std::filesystem::path& path) {
  auto img = read_file(path);
  if (img.channels != 1) throw FormatError(path.string() + ": expected P5 graymap");
  return BinaryMask(img.width, img.height, std::move(img.pixels));
}

std::vector<std::uint8_t> encode_gray(std::size_t width, std::size_t height,
                                      std::span<const std::uint8_t> pixels) {
  return with_header("P5", width, height, pixels);
}

std::vector<std::uint8_t> encode_rgb(const RgbFrame& frame) {
  return with_header("P6", frame.width(), frame.height(), frame.data());
}

void write_gray(const std::filesystem::path& path, const GrayFrame& frame) {
  io::write_atomic(path, encode_gray(frame.width(), frame.height(), frame.data()));
}

void write_mask(const std::filesystem::path& path, const BinaryMask& mask) {
  io::write_atomic(path, encode_gray(mask.width(), mask.height(), mask.data()));
}

void write_rgb(const std::filesystem::path& path, const RgbFrame& frame) {
  io::write_atomic(path, encode_rgb(frame));
}

}  // namespace fdaclip::pnm
