/**
 * @file acceptance.cpp
 * @brief Acceptance suite: one PASS/FAIL line per criterion, with the
 * criterion's tolerance and runtime bound pinned here.
 */
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "fdaclip/fileio.hpp"
#include "fdaclip/harness.hpp"
#include "fdaclip/maskgen.hpp"
#include "fdaclip/retrieval.hpp"
#include "fdaclip/synthetic.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace fdaclip;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double max_seconds;
  std::function<Outcome()> run;
};

bool subset(const BinaryMask& a, const BinaryMask& b) {
  for (std::size_t i = 0; i < a.pixel_count(); ++i)
    if (a.data()[i] && !b.data()[i]) return false;
  return true;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// ---------------------------------------------------------------- 1

Outcome meta_sum_tables() {
  struct Row {
    const char* name;
    double r[6];
    double printed;
  };
  // Every row of the two comparison tables that reports all six recall values.
  const Row rows[] = {
      {"MSVD CLIP2Video", {47.0, 76.8, 85.9, 58.7, 85.6, 91.6}, 445.6},
      {"MSVD X-Pool", {47.2, 77.4, 86.0, 66.4, 90.0, 94.2}, 461.2},
      {"MSVD CLIP4Clip", {45.2, 75.5, 84.3, 62.0, 87.3, 92.6}, 446.9},
      {"MSVD CenterCLIP", {47.4, 76.5, 85.2, 62.7, 88.1, 92.8}, 452.7},
      {"MSVD Prompt Switch", {47.1, 76.9, 86.1, 68.5, 91.8, 95.6}, 466.0},
      {"MSVD FDA-CLIP", {48.2, 77.3, 85.8, 70.2, 92.8, 95.5}, 469.8},
      {"MSR-VTT CLIP2TV", {46.1, 72.5, 82.9, 43.9, 73.0, 82.8}, 401.2},
      {"MSR-VTT CLIP2Video", {45.6, 72.6, 81.7, 43.3, 72.3, 82.1}, 397.6},
      {"MSR-VTT EMCL", {46.8, 73.1, 83.1, 46.5, 73.5, 83.5}, 406.5},
      {"MSR-VTT X-CLIP", {46.1, 73.0, 83.1, 46.8, 73.3, 84.0}, 406.3},
      {"MSR-VTT DRL", {47.4, 74.6, 83.8, 45.3, 73.9, 83.3}, 408.3},
      {"MSR-VTT X-Pool", {46.9, 72.8, 82.2, 44.4, 73.3, 84.0}, 403.6},
      {"MSR-VTT CLIP4Clip", {44.5, 71.4, 81.6, 42.7, 70.9, 80.6}, 391.7},
      {"MSR-VTT CenterCLIP", {44.2, 71.6, 82.1, 42.8, 71.7, 82.2}, 394.6},
      {"MSR-VTT TS2-Net", {44.4, 72.1, 82.2, 43.7, 70.8, 80.4}, 393.6},
      {"MSR-VTT Prompt Switch", {46.1, 72.8, 81.8, 44.8, 73.7, 82.4}, 401.6},
      {"MSR-VTT FDA-CLIP", {45.4, 73.1, 82.6, 45.8, 74.4, 84.4}, 405.7},
  };
  Outcome out;
  double worst = 0.0;
  for (const auto& row : rows) {
    retrieval::DirectionMetrics t2v{row.r[0], row.r[1], row.r[2], 0, 0.0};
    retrieval::DirectionMetrics v2t{row.r[3], row.r[4], row.r[5], 0, 0.0};
    const double err = std::abs(retrieval::meta_sum(t2v, v2t) - row.printed);
    worst = std::max(worst, err);
    if (err > 0.1) {
      out.pass = false;
      out.detail += std::string(row.name) + " off by " + fmt("%.3f", err) + "; ";
    }
  }
  out.detail += fmt("%.0f rows, max |diff| %.2e (tol 0.1)", std::size(rows), worst);
  return out;
}

// ---------------------------------------------------------------- 2

Outcome binarize_oracle() {
  std::mt19937_64 rng(2002);
  std::uniform_int_distribution<int> px(0, 255);
  std::size_t mismatches = 0, checked = 0;
  for (int i = 0; i < 100; ++i) {
    DiffMap d(64, 64);
    for (auto& v : d.data()) v = static_cast<std::uint8_t>(px(rng));
    if (i % 10 == 0) d.data()[0] = 0;  // zero-difference pixels exercise tau = 0
    for (int tau : {0, 1, 25, 100, 255}) {
      ++checked;
      if (maskgen::binarize(d, tau) != oracle::binarize(d, tau)) ++mismatches;
      if (tau == 0 && maskgen::binarize(d, 0) != BinaryMask(64, 64, 255)) ++mismatches;
    }
  }
  return {mismatches == 0, fmt("%.0f maps x tau checked, %.0f mismatches", double(checked), double(mismatches))};
}

// ---------------------------------------------------------------- 3

Outcome pipeline_oracle() {
  std::mt19937_64 rng(3003);
  std::size_t mismatches = 0, nonempty = 0, cases = 0;
  auto run_case = [&](const GrayFrame& a, const GrayFrame& b, const maskgen::MaskConfig& cfg,
                      const oracle::PipelineParams& p) {
    auto masks = maskgen::generate_masks({a, b}, cfg);
    auto expect = oracle::pipeline(a, b, p);
    ++cases;
    if (masks[1] != expect || masks[0] != expect) ++mismatches;
    if (white_fraction(expect) > 0) ++nonempty;
  };
  for (int i = 0; i < 100; ++i) {
    auto a = oracle::random_gray(rng, 32, 32);
    auto b = oracle::perturbed(rng, a);
    run_case(a, b, maskgen::MaskConfig{}, oracle::PipelineParams{});
  }
  // Varied parameters.
  for (int i = 0; i < 40; ++i) {
    auto a = oracle::random_gray(rng, 32, 32);
    auto b = oracle::perturbed(rng, a);
    maskgen::MaskConfig cfg;
    oracle::PipelineParams p;
    const std::size_t kernels[] = {1, 3, 5, 7};
    cfg.tau = p.tau = static_cast<int>(rng() % 60);
    cfg.close_kernel = kernels[rng() % 4];
    cfg.open_kernel = kernels[rng() % 3];
    cfg.median_kernel = kernels[rng() % 3];
    cfg.min_area = p.min_area = rng() % 80;
    cfg.connectivity = rng() % 2 ? maskgen::Connectivity::Four : maskgen::Connectivity::Eight;
    p.close_k = static_cast<long>(cfg.close_kernel);
    p.open_k = static_cast<long>(cfg.open_kernel);
    p.median_k = static_cast<long>(cfg.median_kernel);
    p.connectivity = static_cast<int>(cfg.connectivity);
    run_case(a, b, cfg, p);
  }
  return {mismatches == 0 && nonempty > 50,
          fmt("%.0f two-frame inputs, %.0f mismatches, %.0f with nonempty masks", double(cases), double(mismatches),
              double(nonempty))};
}

// ---------------------------------------------------------------- 4

Outcome morphology_laws() {
  std::mt19937_64 rng(4004);
  std::size_t failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t w = 1 + rng() % 32, h = 1 + rng() % 32;
    auto m = i % 2 ? oracle::random_mask(rng, w, h, 0.15 + 0.7 * double(rng() % 100) / 100.0)
                   : oracle::random_blobs(rng, w, h);
    const std::size_t k = i % 3 == 0 ? 5 : 3;
    auto opened = maskgen::morph_open(m, k);
    auto closed = maskgen::morph_close(m, k);
    bool ok = subset(opened, m) && subset(m, closed);
    ok = ok && maskgen::morph_open(opened, k) == opened && maskgen::morph_close(closed, k) == closed;
    const std::size_t min_area = rng() % 40;
    const auto conn = i % 4 == 0 ? maskgen::Connectivity::Four : maskgen::Connectivity::Eight;
    auto filtered = maskgen::filter_components(m, min_area, conn);
    ok = ok && subset(filtered, m);
    for (const auto& c : oracle::components(filtered, static_cast<int>(conn))) ok = ok && c.size() >= min_area;
    if (!ok) ++failures;
  }
  return {failures == 0, fmt("1000 masks, %.0f law violations", double(failures))};
}

// ---------------------------------------------------------------- 5

Outcome loss_and_gradient() {
  Outcome out;
  const double b1 = retrieval::symmetric_ce_loss(retrieval::SimilarityMatrix(1, 1, 0.42));
  const double b2 = retrieval::symmetric_ce_loss(retrieval::SimilarityMatrix(2, 2, -0.3));
  if (b1 != 0.0) out.pass = false;
  if (std::abs(b2 - std::log(2.0)) > 1e-12) out.pass = false;

  std::mt19937_64 rng(5005);
  std::uniform_real_distribution<double> u(-1.0, 1.0), shift(-50.0, 50.0);
  double worst_shift = 0.0, worst_rel = 0.0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t b = 1 + rng() % 16;
    retrieval::SimilarityMatrix s(b, b);
    for (std::size_t r = 0; r < b; ++r)
      for (std::size_t c = 0; c < b; ++c) s.at(r, c) = u(rng);
    const double base = retrieval::symmetric_ce_loss(s);
    auto shifted = s;
    const double delta = shift(rng);
    for (std::size_t r = 0; r < b; ++r)
      for (std::size_t c = 0; c < b; ++c) shifted.at(r, c) += delta;
    worst_shift = std::max(worst_shift, std::abs(retrieval::symmetric_ce_loss(shifted) - base));

    auto g = retrieval::symmetric_ce_grad(s);
    auto fd = oracle::finite_difference(s, [](const retrieval::SimilarityMatrix& m) { return retrieval::symmetric_ce_loss(m); },
                                        1e-5);
    for (std::size_t r = 0; r < b; ++r)
      for (std::size_t c = 0; c < b; ++c) {
        const double denom = std::max({std::abs(g.at(r, c)), std::abs(fd.at(r, c)), 1e-8});
        worst_rel = std::max(worst_rel, std::abs(g.at(r, c) - fd.at(r, c)) / denom);
      }
  }
  if (worst_shift > 1e-9 || worst_rel >= 1e-4) out.pass = false;
  out.detail = fmt("B=1 loss %.1e, |B=2 - ln2| %.1e, ", b1, std::abs(b2 - std::log(2.0))) +
               fmt("max shift drift %.1e (tol 1e-9), max grad rel err %.2e (tol 1e-4)", worst_shift, worst_rel);
  return out;
}

// ---------------------------------------------------------------- 6

Outcome metric_oracle() {
  std::mt19937_64 rng(6006);
  std::size_t mismatches = 0, multi = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t nv = 1 + rng() % 50;
    const std::size_t nt = nv + rng() % (51 - nv);
    std::vector<std::size_t> t2v(nt);
    for (std::size_t t = 0; t < nv; ++t) t2v[t] = t;
    for (std::size_t t = nv; t < nt; ++t) t2v[t] = rng() % nv;
    std::shuffle(t2v.begin(), t2v.end(), rng);
    if (nt > nv) ++multi;
    retrieval::SimilarityMatrix s(nv, nt);
    const int levels = 2 + static_cast<int>(rng() % 8);  // few distinct levels force ties
    std::uniform_int_distribution<int> q(0, levels - 1);
    for (std::size_t v = 0; v < nv; ++v)
      for (std::size_t t = 0; t < nt; ++t) s.at(v, t) = -1.0 + 2.0 * q(rng) / (levels - 1);
    auto got = retrieval::evaluate(s, retrieval::GroundTruth::from_text_to_video(t2v, nv));
    if (!(got == oracle::evaluate_by_sort(s, t2v))) ++mismatches;
  }
  return {mismatches == 0, fmt("200 matrices (%.0f with multi-caption videos), %.0f mismatching reports",
                               double(multi), double(mismatches))};
}

// ---------------------------------------------------------------- 7

Outcome moving_square_iou() {
  synthetic::MovingSquare spec;  // 128x128, 16 frames, 16 px square, 4 px/frame, noise amplitude 10
  auto clip = synthetic::make_moving_square(spec);
  maskgen::MaskConfig cfg;
  cfg.tau = 25;
  auto masks = maskgen::generate_masks(clip.noisy, cfg);
  double worst = 1.0;
  for (std::size_t t = 1; t < masks.size(); ++t) {
    worst = std::min(worst, synthetic::iou(masks[t], synthetic::changed_pixels(clip.clean[t - 1], clip.clean[t])));
  }
  return {worst >= 0.8, fmt("min IoU over frames 1..15 = %.4f (threshold 0.8), noise amplitude %.0f < tau 25", worst,
                            spec.noise_amplitude)};
}

// ---------------------------------------------------------------- 8

Outcome planted_retrieval() {
  TempDir dir("acceptance_planted");
  synthetic::DatasetSpec spec;
  spec.videos = 8;
  spec.captions_per_video = 3;
  auto manifest = synthetic::write_dataset(dir.path() / "data", spec);
  harness::RunConfig c;
  c.manifest_path = manifest;
  c.output_dir = dir.path() / "out";
  c.backend.kind = harness::BackendKind::Planted;
  c.backend.noise = 0.0;
  c.seed = 17;
  auto r = harness::run_eval(c);
  auto first = io::read_bytes(c.output_dir / "report.json");
  harness::run_eval(c);
  auto second = io::read_bytes(c.output_dir / "report.json");
  const bool ok = r.t2v.r_at_1 == 100.0 && r.v2t.r_at_1 == 100.0 && r.t2v.mean_rank == 1.0 &&
                  r.v2t.mean_rank == 1.0 && first == second;
  return {ok, fmt("R@1 t2v %.1f v2t %.1f, MnR %.2f", r.t2v.r_at_1, r.v2t.r_at_1, r.t2v.mean_rank) +
                  (first == second ? ", reruns byte-identical" : ", reruns DIFFER")};
}

// ---------------------------------------------------------------- 9

Outcome tau_sweep_structure() {
  TempDir dir("acceptance_sweep");
  synthetic::DatasetSpec spec;
  spec.videos = 4;
  spec.frames = 16;
  spec.width = spec.height = 128;
  spec.side = 16;
  auto manifest = synthetic::write_dataset(dir.path() / "data", spec);
  harness::RunConfig c;
  c.manifest_path = manifest;
  c.output_dir = dir.path() / "out";
  c.backend.dim = 64;
  auto rows = harness::run_sweep(c, {0, 1, 25, 100, 255});
  bool ok = rows.size() == 5 && rows[0].white_fraction == 1.0 && rows[4].white_fraction == 0.0;
  for (std::size_t i = 2; i < rows.size(); ++i) ok = ok && rows[i].white_fraction <= rows[i - 1].white_fraction;
  std::string detail = "white_fraction by tau:";
  for (const auto& r : rows) detail += " " + std::to_string(r.tau) + "->" + fmt("%.4f", r.white_fraction);
  return {ok, detail};
}

// --------------------------------------------------------------- 10

Outcome non_reproducibility_statement() {
  std::ifstream in(README_PATH);
  std::stringstream ss;
  ss << in.rdbuf();
  const bool stated = ss.str().find("are not reproduced") != std::string::npos;
  return {stated, stated ? "README states that published retrieval numbers are not reproduced; criteria 1-9 substitute"
                         : "README lacks the non-reproducibility statement"};
}

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "Meta Sum arithmetic of published rows", 1.0, meta_sum_tables},
      {2, "binarization equals per-pixel oracle", 5.0, binarize_oracle},
      {3, "mask pipeline equals brute-force reference", 30.0, pipeline_oracle},
      {4, "morphology and component-filter laws", 30.0, morphology_laws},
      {5, "contrastive loss values, shift invariance, gradient", 10.0, loss_and_gradient},
      {6, "retrieval metrics equal sort-based oracle", 20.0, metric_oracle},
      {7, "moving-square mask IoU", 5.0, moving_square_iou},
      {8, "planted retrieval and determinism", 5.0, planted_retrieval},
      {9, "tau sweep white-fraction structure", 10.0, tau_sweep_structure},
      {10, "published retrieval numbers not reproduced", 1.0, non_reproducibility_statement},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.max_seconds;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("[%s] AC%-2d %s: %s [%.2fs / limit %.0fs%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.max_seconds, in_time ? "" : " EXCEEDED");
  }
  std::printf("%d/%zu acceptance criteria passed\n", int(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
