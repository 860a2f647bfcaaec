/**
 * @file ingest.cpp
 * @brief Frame sequence loading and preprocessing.
 */
#include "fdaclip/ingest.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <stdexcept>

#include "fdaclip/pnm.hpp"

namespace fdaclip::ingest {

void validate(const FrameSequence& seq) {
  if (seq.frames.empty()) throw DataError("frame sequence '" + seq.source_id + "' is empty");
  const auto& first = seq.frames.front();
  for (std::size_t i = 1; i < seq.frames.size(); ++i) {
    if (!seq.frames[i].same_shape(first)) {
      throw DataError("frame sequence '" + seq.source_id + "': frame " + std::to_string(i) + " is " +
                      std::to_string(seq.frames[i].width()) + "x" + std::to_string(seq.frames[i].height()) +
                      ", expected " + std::to_string(first.width()) + "x" + std::to_string(first.height()));
    }
  }
  if (!seq.paths.empty() && seq.paths.size() != seq.frames.size()) {
    throw DataError("frame sequence '" + seq.source_id + "': path list does not match frame count");
  }
}

FrameSequence load_frame_sequence(const std::filesystem::path& dir, std::string_view pattern,
                                  std::string source_id) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DataError("frame directory not found: " + dir.string());

  const std::string glob(pattern);
  std::vector<fs::path> matched;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto name = entry.path().filename().string();
    if (::fnmatch(glob.c_str(), name.c_str(), 0) == 0) matched.push_back(entry.path());
  }
  if (matched.empty()) {
    throw DataError("no files matching '" + glob + "' in " + dir.string());
  }
  std::sort(matched.begin(), matched.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

  FrameSequence seq;
  seq.source_id = source_id.empty() ? dir.filename().string() : std::move(source_id);
  seq.frames.reserve(matched.size());
  for (const auto& path : matched) seq.frames.push_back(pnm::read_rgb(path));
  seq.paths = std::move(matched);
  validate(seq);
  return seq;
}

std::vector<std::size_t> sample_uniform(std::size_t total_frames, std::size_t n) {
  if (total_frames == 0) throw std::invalid_argument("sample_uniform: no frames to sample");
  if (n == 0) throw std::invalid_argument("sample_uniform: sample count must be positive");
  std::vector<std::size_t> indices;
  if (total_frames < n) {
    indices.resize(total_frames);
    for (std::size_t i = 0; i < total_frames; ++i) indices[i] = i;
    return indices;
  }
  indices.reserve(n);
  for (std::size_t i = 0; i < n; ++i) indices.push_back(i * total_frames / n);
  return indices;
}

FrameSequence select_frames(const FrameSequence& seq, const std::vector<std::size_t>& indices) {
  FrameSequence out;
  out.source_id = seq.source_id;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    auto idx = indices[k];
    if (idx >= seq.frames.size() || (k > 0 && idx <= indices[k - 1])) {
      throw std::invalid_argument("select_frames: indices must be increasing and in range");
    }
    out.frames.push_back(seq.frames[idx]);
    if (!seq.paths.empty()) out.paths.push_back(seq.paths[idx]);
  }
  return out;
}

GrayFrame to_grayscale(const RgbFrame& frame) {
  GrayFrame gray(frame.width(), frame.height());
  auto src = frame.data();
  auto dst = gray.data();
  // Fixed-point BT.601: weights scaled by 1000, +500 rounds half up.
  for (std::size_t i = 0; i < dst.size(); ++i) {
    unsigned r = src[3 * i], g = src[3 * i + 1], b = src[3 * i + 2];
    unsigned luma = (299 * r + 587 * g + 114 * b + 500) / 1000;
    dst[i] = static_cast<std::uint8_t>(std::min(luma, 255u));
  }
  return gray;
}

RgbFrame to_rgb(const GrayFrame& frame) {
  RgbFrame rgb(frame.width(), frame.height());
  auto src = frame.data();
  auto dst = rgb.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[3 * i] = dst[3 * i + 1] = dst[3 * i + 2] = src[i];
  return rgb;
}

}  // namespace fdaclip::ingest
