/**
 * @file maskgen.cpp
 * @brief Frame differencing, thresholding and binary mask clean-up.
 */
#include "fdaclip/maskgen.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fdaclip::maskgen {

namespace {

void require_odd(std::size_t kernel_side, const char* op) {
  if (kernel_side == 0 || kernel_side % 2 == 0) {
    throw std::invalid_argument(std::string(op) + ": kernel side must be odd and >= 1, got " +
                                std::to_string(kernel_side));
  }
}

// Plain 0/1 plane used internally so morphology can run on padded canvases.
struct Plane {
  std::size_t width;
  std::size_t height;
  std::vector<std::uint8_t> bits;
};

Plane to_plane(const BinaryMask& mask, std::size_t pad) {
  Plane p{mask.width() + 2 * pad, mask.height() + 2 * pad, {}};
  p.bits.assign(p.width * p.height, 0);
  for (std::size_t y = 0; y < mask.height(); ++y) {
    for (std::size_t x = 0; x < mask.width(); ++x) {
      p.bits[(y + pad) * p.width + x + pad] = mask.at(x, y) ? 1 : 0;
    }
  }
  return p;
}

BinaryMask from_plane(const Plane& p, std::size_t pad, std::size_t width, std::size_t height) {
  BinaryMask out(width, height);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      out.at(x, y) = p.bits[(y + pad) * p.width + x + pad] ? 255 : 0;
    }
  }
  return out;
}

// Sliding-window count of set pixels along one axis. Pixels beyond the plane
// are background. dilate: any set pixel in the window; erode: all k set.
void window_pass(const Plane& src, Plane& dst, std::size_t radius, bool dilate, bool horizontal) {
  const std::size_t k = 2 * radius + 1;
  const std::size_t lines = horizontal ? src.height : src.width;
  const std::size_t len = horizontal ? src.width : src.height;
  auto index = [&](std::size_t line, std::size_t pos) {
    return horizontal ? line * src.width + pos : pos * src.width + line;
  };
  for (std::size_t line = 0; line < lines; ++line) {
    std::size_t count = 0;
    // Window for pos covers [pos - radius, pos + radius].
    for (std::size_t pos = 0; pos < std::min(radius, len); ++pos) count += src.bits[index(line, pos)];
    for (std::size_t pos = 0; pos < len; ++pos) {
      if (pos + radius < len) count += src.bits[index(line, pos + radius)];
      if (pos >= radius + 1) count -= src.bits[index(line, pos - radius - 1)];
      dst.bits[index(line, pos)] = dilate ? (count > 0) : (count == k);
    }
  }
}

Plane morph(const Plane& src, std::size_t kernel_side, bool dilate) {
  const std::size_t radius = kernel_side / 2;
  Plane tmp = src;
  Plane out = src;
  window_pass(src, tmp, radius, dilate, true);
  window_pass(tmp, out, radius, dilate, false);
  return out;
}

}  // namespace

void MaskConfig::validate() const {
  if (tau < 0 || tau > 255) throw std::invalid_argument("tau must lie in [0, 255]");
  require_odd(close_kernel, "close_kernel");
  require_odd(open_kernel, "open_kernel");
  require_odd(median_kernel, "median_kernel");
  if (connectivity != Connectivity::Four && connectivity != Connectivity::Eight) {
    throw std::invalid_argument("connectivity must be 4 or 8");
  }
}

Connectivity connectivity_from_int(int value) {
  if (value == 4) return Connectivity::Four;
  if (value == 8) return Connectivity::Eight;
  throw std::invalid_argument("connectivity must be 4 or 8, got " + std::to_string(value));
}

DiffMap frame_diff(const GrayFrame& prev, const GrayFrame& cur) {
  if (!prev.same_shape(cur)) throw DataError("frame_diff: frames differ in size");
  DiffMap diff(cur.width(), cur.height());
  auto a = prev.data();
  auto b = cur.data();
  auto d = diff.data();
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = static_cast<std::uint8_t>(a[i] > b[i] ? a[i] - b[i] : b[i] - a[i]);
  }
  return diff;
}

BinaryMask binarize(const DiffMap& diff, int tau) {
  if (tau < 0 || tau > 255) throw std::invalid_argument("binarize: tau must lie in [0, 255]");
  if (tau == 0) return BinaryMask(diff.width(), diff.height(), 255);
  BinaryMask mask(diff.width(), diff.height());
  auto src = diff.data();
  auto dst = mask.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > tau ? 255 : 0;
  return mask;
}

BinaryMask dilate(const BinaryMask& mask, std::size_t kernel_side) {
  require_odd(kernel_side, "dilate");
  auto out = morph(to_plane(mask, 0), kernel_side, true);
  return from_plane(out, 0, mask.width(), mask.height());
}

BinaryMask erode(const BinaryMask& mask, std::size_t kernel_side) {
  require_odd(kernel_side, "erode");
  auto out = morph(to_plane(mask, 0), kernel_side, false);
  return from_plane(out, 0, mask.width(), mask.height());
}

BinaryMask morph_close(const BinaryMask& mask, std::size_t kernel_side) {
  require_odd(kernel_side, "morph_close");
  if (kernel_side == 1) return mask;
  // The dilation may spill up to radius pixels past the frame; keep that band
  // so the erosion step sees the same set as it would on an unbounded plane.
  const std::size_t pad = kernel_side / 2;
  auto plane = morph(morph(to_plane(mask, pad), kernel_side, true), kernel_side, false);
  return from_plane(plane, pad, mask.width(), mask.height());
}

BinaryMask morph_open(const BinaryMask& mask, std::size_t kernel_side) {
  require_odd(kernel_side, "morph_open");
  if (kernel_side == 1) return mask;
  auto plane = morph(morph(to_plane(mask, 0), kernel_side, false), kernel_side, true);
  return from_plane(plane, 0, mask.width(), mask.height());
}

BinaryMask median_filter(const BinaryMask& mask, std::size_t kernel_side) {
  require_odd(kernel_side, "median_filter");
  if (kernel_side == 1) return mask;
  const auto w = static_cast<std::ptrdiff_t>(mask.width());
  const auto h = static_cast<std::ptrdiff_t>(mask.height());
  const auto r = static_cast<std::ptrdiff_t>(kernel_side / 2);
  auto clamp = [](std::ptrdiff_t v, std::ptrdiff_t hi) { return std::clamp<std::ptrdiff_t>(v, 0, hi - 1); };

  // Horizontal window counts with replicated edges, then vertical.
  std::vector<std::uint32_t> row_counts(mask.pixel_count(), 0);
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      std::uint32_t c = 0;
      for (std::ptrdiff_t dx = -r; dx <= r; ++dx) c += mask.at(clamp(x + dx, w), y) ? 1 : 0;
      row_counts[y * w + x] = c;
    }
  }
  const std::size_t window = kernel_side * kernel_side;
  BinaryMask out(mask.width(), mask.height());
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      std::size_t c = 0;
      for (std::ptrdiff_t dy = -r; dy <= r; ++dy) c += row_counts[clamp(y + dy, h) * w + x];
      out.at(x, y) = 2 * c > window ? 255 : 0;
    }
  }
  return out;
}

ComponentLabels label_components(const BinaryMask& mask, Connectivity connectivity) {
  if (connectivity != Connectivity::Four && connectivity != Connectivity::Eight) {
    throw std::invalid_argument("label_components: connectivity must be 4 or 8");
  }
  const std::size_t w = mask.width();
  const std::size_t h = mask.height();
  const bool eight = connectivity == Connectivity::Eight;

  // Two-pass labelling with union-find over provisional labels.
  std::vector<std::uint32_t> parent{0};
  auto find = [&](std::uint32_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  auto unite = [&](std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };

  std::vector<std::uint32_t> labels(w * h, 0);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      if (!mask.at(x, y)) continue;
      std::uint32_t neighbours[4];
      std::size_t n = 0;
      if (x > 0 && labels[y * w + x - 1]) neighbours[n++] = labels[y * w + x - 1];
      if (y > 0) {
        if (labels[(y - 1) * w + x]) neighbours[n++] = labels[(y - 1) * w + x];
        if (eight && x > 0 && labels[(y - 1) * w + x - 1]) neighbours[n++] = labels[(y - 1) * w + x - 1];
        if (eight && x + 1 < w && labels[(y - 1) * w + x + 1]) neighbours[n++] = labels[(y - 1) * w + x + 1];
      }
      if (n == 0) {
        auto id = static_cast<std::uint32_t>(parent.size());
        parent.push_back(id);
        labels[y * w + x] = id;
        continue;
      }
      auto best = *std::min_element(neighbours, neighbours + n);
      labels[y * w + x] = best;
      for (std::size_t i = 0; i < n; ++i) unite(best, neighbours[i]);
    }
  }

  // Compact root ids in raster order of first appearance.
  ComponentLabels result;
  std::vector<std::uint32_t> compact(parent.size(), 0);
  result.labels.assign(w * h, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i]) continue;
    auto root = find(labels[i]);
    if (!compact[root]) {
      result.areas.push_back(0);
      compact[root] = static_cast<std::uint32_t>(result.areas.size());
    }
    result.labels[i] = compact[root];
    ++result.areas[compact[root] - 1];
  }
  return result;
}

BinaryMask filter_components(const BinaryMask& mask, std::size_t min_area, Connectivity connectivity) {
  auto comps = label_components(mask, connectivity);
  if (min_area == 0) return mask;
  BinaryMask out(mask.width(), mask.height());
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    auto id = comps.labels[i];
    dst[i] = (id && comps.areas[id - 1] >= min_area) ? 255 : 0;
  }
  return out;
}

BinaryMask postprocess(const BinaryMask& mask, const MaskConfig& config) {
  config.validate();
  auto m = morph_close(mask, config.close_kernel);
  m = morph_open(m, config.open_kernel);
  m = median_filter(m, config.median_kernel);
  return filter_components(m, config.min_area, config.connectivity);
}

std::vector<BinaryMask> generate_masks(const std::vector<GrayFrame>& frames, const MaskConfig& config) {
  config.validate();
  if (frames.empty()) throw DataError("generate_masks: no frames");
  const auto& first = frames.front();
  for (const auto& f : frames) {
    if (!f.same_shape(first)) throw DataError("generate_masks: frames differ in size");
  }
  if (frames.size() == 1 || config.tau == 0) {
    return std::vector<BinaryMask>(frames.size(), BinaryMask(first.width(), first.height(), 255));
  }
  std::vector<BinaryMask> masks(frames.size());
  for (std::size_t t = 1; t < frames.size(); ++t) {
    masks[t] = postprocess(binarize(frame_diff(frames[t - 1], frames[t]), config.tau), config);
  }
  masks[0] = masks[1];
  return masks;
}

BinaryMask resize_mask(const BinaryMask& mask, std::size_t out_width, std::size_t out_height) {
  if (out_width == 0 || out_height == 0) throw std::invalid_argument("resize_mask: zero target dimension");
  BinaryMask out(out_width, out_height);
  for (std::size_t y = 0; y < out_height; ++y) {
    const std::size_t sy = y * mask.height() / out_height;
    for (std::size_t x = 0; x < out_width; ++x) {
      out.at(x, y) = mask.at(x * mask.width() / out_width, sy);
    }
  }
  return out;
}

}  // namespace fdaclip::maskgen

namespace fdaclip {

double white_fraction(const BinaryMask& mask) {
  if (mask.empty()) return 0.0;
  auto d = mask.data();
  auto white = std::count(d.begin(), d.end(), std::uint8_t{255});
  return static_cast<double>(white) / static_cast<double>(d.size());
}

}  // namespace fdaclip
