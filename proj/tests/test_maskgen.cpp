#include <doctest.h>

#include <random>

#include "fdaclip/maskgen.hpp"
#include "fdaclip/synthetic.hpp"
#include "oracles.hpp"

using namespace fdaclip;
using namespace fdaclip::maskgen;

namespace {

GrayFrame gray1(std::uint8_t v) { return GrayFrame(1, 1, v); }

DiffMap diff1(std::uint8_t v) { return DiffMap(1, 1, v); }

BinaryMask square_with_hole(std::size_t canvas, std::size_t side) {
  BinaryMask m(canvas, canvas);
  const std::size_t off = (canvas - side) / 2;
  for (std::size_t y = off; y < off + side; ++y)
    for (std::size_t x = off; x < off + side; ++x) m.at(x, y) = 255;
  m.at(canvas / 2, canvas / 2) = 0;
  return m;
}

bool subset(const BinaryMask& a, const BinaryMask& b) {
  for (std::size_t i = 0; i < a.pixel_count(); ++i)
    if (a.data()[i] && !b.data()[i]) return false;
  return true;
}

}  // namespace

TEST_CASE("frame_diff is the absolute per-pixel difference") {
  CHECK(frame_diff(gray1(100), gray1(130)).at(0, 0) == 30);
  CHECK(frame_diff(gray1(250), gray1(10)).at(0, 0) == 240);
  GrayFrame a(5, 4, 9);
  CHECK(frame_diff(a, a) == DiffMap(5, 4, 0));
  CHECK_THROWS_AS(frame_diff(GrayFrame(2, 2), GrayFrame(2, 3)), DataError);

  std::mt19937_64 rng(1);
  auto x = oracle::random_gray(rng, 17, 9), y = oracle::random_gray(rng, 17, 9);
  CHECK(frame_diff(x, y) == frame_diff(y, x));
}

TEST_CASE("binarize applies a strict threshold with the tau=0 special case") {
  CHECK(binarize(diff1(30), 25).at(0, 0) == 255);
  CHECK(binarize(diff1(25), 25).at(0, 0) == 0);
  CHECK(binarize(diff1(0), 0).at(0, 0) == 255);
  CHECK(binarize(DiffMap(8, 8, 0), 0) == BinaryMask(8, 8, 255));
  CHECK(binarize(DiffMap(8, 8, 255), 255) == BinaryMask(8, 8, 0));
  CHECK_THROWS_AS(binarize(diff1(0), 256), std::invalid_argument);
  CHECK_THROWS_AS(binarize(diff1(0), -1), std::invalid_argument);
}

TEST_CASE("binarize is monotone in tau") {
  std::mt19937_64 rng(2);
  auto g1 = oracle::random_gray(rng, 20, 20), g2 = oracle::random_gray(rng, 20, 20);
  auto d = frame_diff(g1, g2);
  for (int t1 = 0; t1 + 7 <= 255; t1 += 7) {
    CHECK(subset(binarize(d, t1 + 7), binarize(d, t1)));
  }
}

TEST_CASE("closing fills a one-pixel hole") {
  // 7x7 white square with a black centre, on a larger background and as the whole frame.
  auto filled = morph_close(square_with_hole(13, 7), 3);
  CHECK(filled == oracle::close(square_with_hole(13, 7), 3));
  CHECK(filled.at(6, 6) == 255);
  CHECK(std::count(filled.data().begin(), filled.data().end(), 255) == 49);

  auto whole = square_with_hole(7, 7);
  CHECK(morph_close(whole, 3) == BinaryMask(7, 7, 255));
  CHECK(morph_close(BinaryMask(9, 9), 5) == BinaryMask(9, 9));
  CHECK(morph_close(whole, 1) == whole);
  CHECK_THROWS_AS(morph_close(whole, 4), std::invalid_argument);
}

TEST_CASE("opening removes specks; erosion alone erases the border band") {
  BinaryMask speck(9, 9);
  speck.at(4, 4) = 255;
  CHECK(morph_open(speck, 3) == BinaryMask(9, 9));

  for (std::size_t k : {3u, 5u}) {
    // The eroded band lies within reach of the dilation, so opening restores it.
    auto opened = morph_open(BinaryMask(12, 10, 255), k);
    CHECK(opened == oracle::open(BinaryMask(12, 10, 255), static_cast<long>(k)));
    CHECK(opened == BinaryMask(12, 10, 255));
    auto eroded = erode(BinaryMask(12, 10, 255), k);
    const std::size_t band = (k - 1) / 2;
    for (std::size_t y = 0; y < 10; ++y)
      for (std::size_t x = 0; x < 12; ++x) {
        const bool interior = x >= band && y >= band && x + band < 12 && y + band < 10;
        CHECK(eroded.at(x, y) == (interior ? 255 : 0));
      }
  }
  CHECK(morph_open(speck, 1) == speck);
  CHECK_THROWS_AS(morph_open(speck, 2), std::invalid_argument);
}

TEST_CASE("dilate and erode match the set-based oracle") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    auto m = oracle::random_mask(rng, 1 + rng() % 20, 1 + rng() % 20, 0.4);
    for (long k : {1L, 3L, 5L, 7L}) {
      auto s = oracle::to_set(m);
      CHECK(dilate(m, k) == oracle::to_mask(oracle::dilate(s, k), m.width(), m.height()));
      CHECK(erode(m, k) == oracle::to_mask(oracle::erode(s, k), m.width(), m.height()));
      CHECK(morph_close(m, k) == oracle::close(m, k));
      CHECK(morph_open(m, k) == oracle::open(m, k));
    }
  }
}

TEST_CASE("median filter is a majority vote with replicated borders") {
  BinaryMask single(9, 9);
  single.at(4, 4) = 255;
  CHECK(median_filter(single, 3) == BinaryMask(9, 9));
  CHECK(median_filter(BinaryMask(6, 6, 255), 3) == BinaryMask(6, 6, 255));

  BinaryMask pair(9, 9);
  pair.at(3, 4) = pair.at(4, 4) = 255;
  CHECK(median_filter(pair, 3) == BinaryMask(9, 9));

  // Corner pixel with replicated border: its 3x3 window sees the corner 4 times.
  BinaryMask corner(5, 5);
  corner.at(0, 0) = corner.at(1, 0) = 255;
  CHECK(median_filter(corner, 3).at(0, 0) == 255);
  CHECK(median_filter(corner, 3) == oracle::median(corner, 3));

  std::mt19937_64 rng(6);
  for (int i = 0; i < 40; ++i) {
    auto m = oracle::random_mask(rng, 1 + rng() % 16, 1 + rng() % 16, 0.5);
    for (long k : {1L, 3L, 5L}) CHECK(median_filter(m, k) == oracle::median(m, k));
  }
  CHECK_THROWS_AS(median_filter(single, 0), std::invalid_argument);
}

TEST_CASE("component filter keeps areas at or above min_area") {
  BinaryMask m(20, 20);
  for (std::size_t i = 0; i < 49; ++i) m.at(i % 10, i / 10) = 255;  // area 49
  CHECK(filter_components(m, 50, Connectivity::Eight) == BinaryMask(20, 20));
  m.at(9, 4) = 255;  // area 50
  CHECK(filter_components(m, 50, Connectivity::Eight) == m);
  CHECK(filter_components(m, 0, Connectivity::Eight) == m);
  CHECK_THROWS_AS(connectivity_from_int(6), std::invalid_argument);
  CHECK_THROWS_AS(filter_components(m, 1, static_cast<Connectivity>(6)), std::invalid_argument);
}

TEST_CASE("connectivity decides whether diagonal pixels join") {
  BinaryMask diag(4, 4);
  for (std::size_t i = 0; i < 4; ++i) diag.at(i, i) = 255;
  CHECK(label_components(diag, Connectivity::Eight).areas == std::vector<std::size_t>{4});
  CHECK(label_components(diag, Connectivity::Four).areas.size() == 4);
  CHECK(filter_components(diag, 2, Connectivity::Four) == BinaryMask(4, 4));
  CHECK(filter_components(diag, 2, Connectivity::Eight) == diag);
}

TEST_CASE("labelling agrees with the flood-fill oracle") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    auto m = oracle::random_mask(rng, 1 + rng() % 30, 1 + rng() % 30, 0.3 + 0.4 * (i % 3) / 2.0);
    for (int conn : {4, 8}) {
      const auto c = connectivity_from_int(conn);
      auto areas = label_components(m, c).areas;
      std::vector<std::size_t> expect;
      for (const auto& comp : oracle::components(m, conn)) expect.push_back(comp.size());
      std::sort(areas.begin(), areas.end());
      std::sort(expect.begin(), expect.end());
      CHECK(areas == expect);
      for (std::size_t min_area : {0u, 1u, 3u, 10u}) {
        CHECK(filter_components(m, min_area, c) == oracle::filter_components(m, min_area, conn));
      }
    }
  }
}

TEST_CASE("generate_masks alignment and degenerate cases") {
  MaskConfig cfg;
  SUBCASE("identical frames give black masks") {
    auto masks = generate_masks({GrayFrame(16, 16, 40), GrayFrame(16, 16, 40)}, cfg);
    REQUIRE(masks.size() == 2);
    CHECK(masks[0] == BinaryMask(16, 16));
    CHECK(masks[1] == BinaryMask(16, 16));
  }
  SUBCASE("tau 0 gives white masks for any frames") {
    std::mt19937_64 rng(9);
    cfg.tau = 0;
    std::vector<GrayFrame> frames{oracle::random_gray(rng, 10, 12), oracle::random_gray(rng, 10, 12),
                                  oracle::random_gray(rng, 10, 12)};
    for (const auto& m : generate_masks(frames, cfg)) CHECK(m == BinaryMask(10, 12, 255));
  }
  SUBCASE("single frame gives a white mask") {
    auto masks = generate_masks({GrayFrame(4, 4, 1)}, cfg);
    REQUIRE(masks.size() == 1);
    CHECK(masks[0] == BinaryMask(4, 4, 255));
  }
  SUBCASE("frame 0 reuses the first difference") {
    synthetic::MovingSquare spec;
    spec.frames = 4;
    auto clip = synthetic::make_moving_square(spec);
    auto masks = generate_masks(clip.noisy, cfg);
    REQUIRE(masks.size() == 4);
    CHECK(masks[0] == masks[1]);
    CHECK(masks[2] == postprocess(binarize(frame_diff(clip.noisy[1], clip.noisy[2]), 25), cfg));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(generate_masks({}, cfg), DataError);
    CHECK_THROWS_AS(generate_masks({GrayFrame(4, 4), GrayFrame(5, 4)}, cfg), DataError);
    cfg.close_kernel = 4;
    CHECK_THROWS_AS(generate_masks({GrayFrame(4, 4)}, cfg), std::invalid_argument);
  }
}

TEST_CASE("moving square masks track the changed pixels") {
  synthetic::MovingSquare spec;
  auto clip = synthetic::make_moving_square(spec);
  auto masks = generate_masks(clip.noisy, MaskConfig{});
  for (std::size_t t = 1; t < masks.size(); ++t) {
    auto truth = synthetic::changed_pixels(clip.clean[t - 1], clip.clean[t]);
    CHECK(synthetic::iou(masks[t], truth) >= 0.8);
  }
}

TEST_CASE("white fraction does not grow with tau") {
  synthetic::MovingSquare spec;
  spec.frames = 5;
  spec.noise_amplitude = 30;
  auto clip = synthetic::make_moving_square(spec);
  double previous = 1.0;
  for (int tau = 1; tau <= 255; tau += 3) {
    MaskConfig cfg;
    cfg.tau = tau;
    double total = 0.0;
    for (const auto& m : generate_masks(clip.noisy, cfg)) total += white_fraction(m);
    CHECK(total / 5.0 <= previous);
    previous = total / 5.0;
  }
}

TEST_CASE("resize_mask uses nearest neighbour") {
  BinaryMask m(2, 2, std::vector<std::uint8_t>{255, 0, 0, 255});
  auto big = resize_mask(m, 4, 4);
  const std::vector<std::uint8_t> expect{255, 255, 0, 0, 255, 255, 0, 0, 0, 0, 255, 255, 0, 0, 255, 255};
  CHECK(big == BinaryMask(4, 4, expect));
  CHECK(resize_mask(m, 2, 2) == m);
  CHECK(resize_mask(BinaryMask(7, 3, 255), 224, 224) == BinaryMask(224, 224, 255));
  CHECK_THROWS_AS(resize_mask(m, 0, 3), std::invalid_argument);
}
