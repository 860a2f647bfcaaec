#include "fdaclip/synthetic.hpp"

#include <algorithm>
#include <cstdio>

#include "fdaclip/backends.hpp"
#include "fdaclip/fileio.hpp"
#include "fdaclip/ingest.hpp"
#include "fdaclip/pnm.hpp"

namespace fdaclip::synthetic {

namespace {

std::uint8_t background(std::size_t x, std::size_t y) {
  return static_cast<std::uint8_t>(40 + (3 * x + 5 * y + (x * y) % 7) % 61);
}

}  // namespace

Clip make_moving_square(const MovingSquare& spec) {
  Clip clip;
  std::uint64_t state = spec.seed;
  const int span = 2 * spec.noise_amplitude + 1;
  for (std::size_t t = 0; t < spec.frames; ++t) {
    GrayFrame clean(spec.width, spec.height);
    const long sx = spec.x0 + static_cast<long>(t) * spec.dx;
    const long sy = spec.y0 + static_cast<long>(t) * spec.dy;
    for (std::size_t y = 0; y < spec.height; ++y) {
      for (std::size_t x = 0; x < spec.width; ++x) {
        const auto ix = static_cast<long>(x), iy = static_cast<long>(y);
        const bool inside = ix >= sx && ix < sx + static_cast<long>(spec.side) && iy >= sy &&
                            iy < sy + static_cast<long>(spec.side);
        clean.at(x, y) = inside ? spec.square_level : background(x, y);
      }
    }
    GrayFrame noisy = clean;
    if (spec.noise_amplitude > 0) {
      for (auto& px : noisy.data()) {
        state = encode::splitmix64(state);
        const int n = static_cast<int>(state % static_cast<std::uint64_t>(span)) - spec.noise_amplitude;
        px = static_cast<std::uint8_t>(std::clamp(px + n, 0, 255));
      }
    }
    clip.clean.push_back(std::move(clean));
    clip.noisy.push_back(std::move(noisy));
  }
  return clip;
}

BinaryMask changed_pixels(const GrayFrame& prev, const GrayFrame& cur) {
  BinaryMask m(cur.width(), cur.height());
  for (std::size_t i = 0; i < m.pixel_count(); ++i) m.data()[i] = prev.data()[i] != cur.data()[i] ? 255 : 0;
  return m;
}

double iou(const BinaryMask& a, const BinaryMask& b) {
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.pixel_count(); ++i) {
    const bool x = a.data()[i] != 0, y = b.data()[i] != 0;
    inter += x && y;
    uni += x || y;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::filesystem::path write_dataset(const std::filesystem::path& root, const DatasetSpec& spec) {
  static constexpr const char* kColours[] = {"red", "green", "blue", "white", "grey", "orange", "purple", "yellow"};
  static constexpr const char* kMotions[] = {"slides right", "drops down", "drifts diagonally", "creeps left"};
  nlohmann::json videos = nlohmann::json::array();
  for (std::size_t v = 0; v < spec.videos; ++v) {
    MovingSquare ms;
    ms.width = spec.width;
    ms.height = spec.height;
    ms.frames = spec.frames;
    ms.side = spec.side;
    ms.noise_amplitude = spec.noise_amplitude;
    ms.seed = encode::splitmix64(spec.seed + v);
    ms.square_level = static_cast<std::uint8_t>(160 + (v * 37) % 90);
    const int motion = static_cast<int>(v % 4);
    ms.dx = motion == 0 || motion == 2 ? 2 : (motion == 3 ? -2 : 0);
    ms.dy = motion == 1 || motion == 2 ? 2 : 0;
    ms.x0 = ms.dx < 0 ? static_cast<int>(spec.width) - static_cast<int>(spec.side) - 2 : 2;
    const auto free_rows = spec.height > spec.side + 2 ? spec.height - spec.side - 2 : 1;
    ms.y0 = ms.dy > 0 ? 2 : static_cast<int>((v * 11) % free_rows);
    auto clip = make_moving_square(ms);

    char id[32];
    std::snprintf(id, sizeof id, "vid%03zu", v);
    const auto dir = root / "frames" / id;
    for (std::size_t t = 0; t < clip.noisy.size(); ++t) {
      char name[32];
      std::snprintf(name, sizeof name, "f%03zu.ppm", t);
      // Tint the RGB channels differently so frames are not plain gray.
      RgbFrame rgb = ingest::to_rgb(clip.noisy[t]);
      for (std::size_t i = 0; i < rgb.pixel_count(); ++i) {
        rgb.data()[3 * i + (v % 3)] = static_cast<std::uint8_t>(std::min(255, rgb.data()[3 * i + (v % 3)] + 10));
      }
      pnm::write_rgb(dir / name, rgb);
    }
    nlohmann::json captions = nlohmann::json::array();
    for (std::size_t c = 0; c < spec.captions_per_video; ++c) {
      captions.push_back(std::string("a ") + kColours[v % 8] + " square " + kMotions[motion] + " (clip " +
                         std::to_string(v) + ", take " + std::to_string(c) + ")");
    }
    videos.push_back({{"video_id", id},
                      {"frame_dir", std::string("frames/") + id},
                      {"captions", captions},
                      {"split", "test"}});
  }
  const auto manifest = root / "manifest.json";
  io::write_atomic(manifest, nlohmann::json{{"videos", videos}}.dump(2) + "\n");
  return manifest;
}

}  // namespace fdaclip::synthetic
