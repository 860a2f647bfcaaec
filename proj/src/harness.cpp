/**
 * @file harness.cpp
 * @brief End-to-end orchestration.
 */
#include "fdaclip/harness.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "fdaclip/backends.hpp"
#include "fdaclip/embedding_store.hpp"
#include "fdaclip/fileio.hpp"
#include "fdaclip/pnm.hpp"

namespace fdaclip::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const fs::path& base, const fs::path& p) { return p.is_absolute() ? p : base / p; }

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

Split parse_split(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "test") return Split::Test;
  throw ConfigError("split must be 'train' or 'test', got '" + s + "'");
}

const char* backend_name(BackendKind k) {
  switch (k) {
    case BackendKind::Mock: return "mock";
    case BackendKind::Planted: return "planted";
    case BackendKind::Store: return "store";
    case BackendKind::External: return "external";
  }
  return "?";
}

BackendKind parse_backend_kind(const std::string& s) {
  if (s == "mock") return BackendKind::Mock;
  if (s == "planted") return BackendKind::Planted;
  if (s == "store") return BackendKind::Store;
  if (s == "external") return BackendKind::External;
  throw ConfigError("unknown backend type '" + s + "'");
}

}  // namespace

// ------------------------------------------------------------ manifest

const ManifestEntry* DatasetManifest::find(std::string_view video_id) const {
  for (const auto& e : entries) {
    if (e.video_id == video_id) return &e;
  }
  return nullptr;
}

std::vector<const ManifestEntry*> DatasetManifest::split(Split s) const {
  std::vector<const ManifestEntry*> out;
  for (const auto& e : entries) {
    if (e.split == s) out.push_back(&e);
  }
  return out;
}

DatasetManifest parse_manifest(const json& j, const fs::path& base_dir) {
  const json& videos = j.is_object() && j.contains("videos") ? j.at("videos") : j;
  if (!videos.is_array()) throw ConfigError("manifest must be an array or an object with a 'videos' array");
  DatasetManifest manifest;
  std::set<std::string> seen;
  try {
    for (const auto& v : videos) {
      ManifestEntry e;
      e.video_id = v.at("video_id").get<std::string>();
      e.frame_dir = resolve(base_dir, v.at("frame_dir").get<std::string>());
      e.captions = v.at("captions").get<std::vector<std::string>>();
      e.split = parse_split(v.value("split", std::string("test")));
      if (e.video_id.empty()) throw ConfigError("manifest: empty video_id");
      if (e.captions.empty()) throw ConfigError("manifest: video '" + e.video_id + "' has no captions");
      if (!seen.insert(e.video_id).second) throw ConfigError("manifest: duplicate video_id '" + e.video_id + "'");
      manifest.entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  return manifest;
}

DatasetManifest load_manifest(const fs::path& path) {
  return parse_manifest(read_json_file(path), path.parent_path());
}

// -------------------------------------------------------------- config

void RunConfig::validate() const {
  try {
    mask.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("mask: ") + e.what());
  }
  if (n_frames_train == 0 || n_frames_test == 0) throw ConfigError("frame counts must be at least 1");
  if (backend.kind != BackendKind::Store && backend.dim < 2) throw ConfigError("backend dim must be at least 2");
  if (backend.kind == BackendKind::Planted && !(backend.noise >= 0.0 && backend.noise < 1.0)) {
    throw ConfigError("planted noise must lie in [0, 1)");
  }
  if (backend.kind == BackendKind::Store && backend.store_path.empty()) throw ConfigError("store backend needs 'path'");
  if (backend.kind == BackendKind::External && backend.command.empty()) {
    throw ConfigError("external backend needs 'command'");
  }
}

RunConfig parse_run_config(const json& j, const fs::path& base_dir) {
  RunConfig c;
  try {
    c.manifest_path = resolve(base_dir, j.at("manifest").get<std::string>());
    c.output_dir = resolve(base_dir, j.value("output_dir", std::string("out")));
    c.seed = j.value("seed", std::uint64_t{0});
    c.n_frames_train = j.value("n_frames_train", ingest::kTrainFrames);
    c.n_frames_test = j.value("n_frames_test", ingest::kTestFrames);
    c.frame_pattern = j.value("frame_pattern", c.frame_pattern);
    if (j.contains("mask")) {
      const auto& m = j.at("mask");
      c.mask.tau = m.value("tau", c.mask.tau);
      c.mask.close_kernel = m.value("close_kernel", c.mask.close_kernel);
      c.mask.open_kernel = m.value("open_kernel", c.mask.open_kernel);
      c.mask.median_kernel = m.value("median_kernel", c.mask.median_kernel);
      c.mask.min_area = m.value("min_area", c.mask.min_area);
      try {
        c.mask.connectivity = maskgen::connectivity_from_int(m.value("connectivity", 8));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("mask: ") + e.what());
      }
    }
    if (j.contains("backend")) {
      const auto& b = j.at("backend");
      c.backend.kind = parse_backend_kind(b.at("type").get<std::string>());
      c.backend.dim = b.value("dim", c.backend.dim);
      c.backend.noise = b.value("noise", 0.0);
      if (b.contains("path")) c.backend.store_path = resolve(base_dir, b.at("path").get<std::string>());
      c.backend.command = b.value("command", std::string());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  return parse_run_config(read_json_file(path), path.parent_path());
}

json to_json(const RunConfig& c) {
  json backend = {{"type", backend_name(c.backend.kind)}, {"dim", c.backend.dim}};
  if (c.backend.kind == BackendKind::Planted) backend["noise"] = c.backend.noise;
  if (c.backend.kind == BackendKind::Store) backend["path"] = c.backend.store_path.string();
  if (c.backend.kind == BackendKind::External) backend["command"] = c.backend.command;
  return json{{"manifest", c.manifest_path.string()},
              {"output_dir", c.output_dir.string()},
              {"seed", c.seed},
              {"n_frames_train", c.n_frames_train},
              {"n_frames_test", c.n_frames_test},
              {"frame_pattern", c.frame_pattern},
              {"mask",
               {{"tau", c.mask.tau},
                {"close_kernel", c.mask.close_kernel},
                {"open_kernel", c.mask.open_kernel},
                {"median_kernel", c.mask.median_kernel},
                {"min_area", c.mask.min_area},
                {"connectivity", static_cast<int>(c.mask.connectivity)}}},
              {"backend", backend}};
}

std::uint64_t derive_seed(std::uint64_t run_seed, std::string_view component) {
  encode::KeyedHash h(run_seed, 'S');
  h.update(std::span(reinterpret_cast<const std::uint8_t*>(component.data()), component.size()));
  return encode::splitmix64(h.digest());
}

std::unique_ptr<encode::EncoderBackend> make_backend(const RunConfig& config, const DatasetManifest& manifest) {
  const auto seed = derive_seed(config.seed, "backend");
  try {
    switch (config.backend.kind) {
      case BackendKind::Mock:
        return std::make_unique<encode::MockBackend>(seed, config.backend.dim);
      case BackendKind::Planted: {
        std::map<std::string, std::string> caption_to_video;
        for (const auto* e : manifest.split(Split::Test)) {
          for (const auto& c : e->captions) {
            auto [it, inserted] = caption_to_video.emplace(c, e->video_id);
            if (!inserted && it->second != e->video_id) {
              throw ConfigError("planted backend: caption '" + c + "' belongs to two videos");
            }
          }
        }
        return std::make_unique<encode::PlantedBackend>(std::move(caption_to_video), config.backend.dim,
                                                        config.backend.noise, seed);
      }
      case BackendKind::Store:
        return std::make_unique<encode::StoreBackend>(encode::load_embedding_store(config.backend.store_path));
      case BackendKind::External:
        return std::make_unique<encode::ExternalBackend>(config.backend.command, config.backend.dim,
                                                         config.output_dir / "scratch");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const DataError& e) {
    throw BackendError(e.what());
  }
  throw ConfigError("unhandled backend kind");
}

// ---------------------------------------------------------------- runs

PreparedVideo prepare_video(const ManifestEntry& entry, const RunConfig& config) {
  auto all = ingest::load_frame_sequence(entry.frame_dir, config.frame_pattern, entry.video_id);
  PreparedVideo v;
  v.video_id = entry.video_id;
  v.frame_indices = ingest::sample_uniform(all.frames.size(), config.frames_for(entry.split));
  v.frames = ingest::select_frames(all, v.frame_indices);
  std::vector<GrayFrame> gray;
  gray.reserve(v.frames.frames.size());
  for (const auto& f : v.frames.frames) gray.push_back(ingest::to_grayscale(f));
  v.masks = maskgen::generate_masks(gray, config.mask);
  return v;
}

EvalOutcome evaluate_run(const RunConfig& config, const DatasetManifest& manifest, encode::EncoderBackend& backend) {
  config.validate();
  auto videos = manifest.split(Split::Test);
  if (videos.empty()) throw ConfigError("manifest has no test-split videos");

  std::vector<encode::Embedding> video_embs;
  std::vector<encode::Embedding> text_embs;
  std::vector<std::size_t> text_to_video;
  double white_sum = 0.0;
  std::size_t mask_count = 0;

  for (std::size_t vi = 0; vi < videos.size(); ++vi) {
    const auto& entry = *videos[vi];
    auto prepared = prepare_video(entry, config);
    std::vector<encode::Embedding> frame_embs;
    for (std::size_t k = 0; k < prepared.masks.size(); ++k) {
      white_sum += white_fraction(prepared.masks[k]);
      ++mask_count;
      encode::FrameInput in{prepared.frames.frames[k], prepared.masks[k], entry.video_id,
                            prepared.frame_indices[k],
                            prepared.frames.paths.empty() ? fs::path{} : prepared.frames.paths[k]};
      auto e = backend.encode_frame(in);
      if (e.dim() != backend.dim()) throw BackendError("backend returned wrong frame embedding dimension");
      frame_embs.push_back(std::move(e));
    }
    video_embs.push_back(encode::pool_average(frame_embs));
    for (std::size_t c = 0; c < entry.captions.size(); ++c) {
      auto e = backend.encode_text({entry.captions[c], entry.video_id, c});
      if (e.dim() != backend.dim()) throw BackendError("backend returned wrong text embedding dimension");
      text_embs.push_back(std::move(e));
      text_to_video.push_back(vi);
    }
  }

  EvalOutcome out;
  try {
    out.similarity = retrieval::similarity_matrix(video_embs, text_embs);
  } catch (const DataError& e) {
    throw BackendError(std::string("backend produced unusable embeddings: ") + e.what());
  }
  auto gt = retrieval::GroundTruth::from_text_to_video(std::move(text_to_video), video_embs.size());
  out.report = retrieval::evaluate(out.similarity, gt);
  out.white_fraction = white_sum / static_cast<double>(mask_count);
  out.n_videos = video_embs.size();
  out.n_texts = text_embs.size();
  return out;
}

EvalOutcome evaluate_run(const RunConfig& config) {
  auto manifest = load_manifest(config.manifest_path);
  auto backend = make_backend(config, manifest);
  return evaluate_run(config, manifest, *backend);
}

json report_document(const EvalOutcome& outcome, const RunConfig& config) {
  auto doc = retrieval::to_json(outcome.report);
  doc["n_videos"] = outcome.n_videos;
  doc["n_texts"] = outcome.n_texts;
  doc["tau"] = config.mask.tau;
  doc["white_fraction"] = outcome.white_fraction;
  doc["backend"] = backend_name(config.backend.kind);
  doc["seed"] = config.seed;
  return doc;
}

retrieval::RetrievalReport run_eval(const RunConfig& config) {
  auto outcome = evaluate_run(config);
  io::write_atomic(config.output_dir / "report.json", report_document(outcome, config).dump(2) + "\n");
  return outcome.report;
}

std::vector<SweepRow> tau_sweep(const RunConfig& config, const std::vector<int>& taus) {
  if (taus.empty()) throw ConfigError("tau sweep needs at least one threshold");
  auto manifest = load_manifest(config.manifest_path);
  std::vector<SweepRow> rows;
  for (int tau : taus) {
    RunConfig c = config;
    c.mask.tau = tau;
    c.validate();
    // Fresh backend per point so every tau sees identical backend state.
    auto backend = make_backend(c, manifest);
    auto outcome = evaluate_run(c, manifest, *backend);
    rows.push_back({tau, outcome.report.t2v.r_at_1, outcome.report.v2t.r_at_1, outcome.white_fraction});
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "tau,t2v_r_at_1,v2t_r_at_1,white_fraction\n";
  char line[128];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%d,%.4f,%.4f,%.6f\n", r.tau, r.t2v_r_at_1, r.v2t_r_at_1, r.white_fraction);
    out += line;
  }
  return out;
}

std::vector<SweepRow> run_sweep(const RunConfig& config, const std::vector<int>& taus) {
  auto rows = tau_sweep(config, taus);
  io::write_atomic(config.output_dir / "sweep.csv", sweep_csv(rows));
  return rows;
}

std::vector<fs::path> export_masks(const RunConfig& config, std::string_view video_id) {
  config.validate();
  auto manifest = load_manifest(config.manifest_path);
  const auto* entry = manifest.find(video_id);
  if (!entry) throw ConfigError("video '" + std::string(video_id) + "' is not in the manifest");
  auto prepared = prepare_video(*entry, config);
  std::vector<fs::path> written;
  for (std::size_t k = 0; k < prepared.masks.size(); ++k) {
    auto path = config.output_dir / "masks" /
                (std::string(video_id) + "_" + std::to_string(prepared.frame_indices[k]) + ".pgm");
    pnm::write_mask(path, prepared.masks[k]);
    written.push_back(std::move(path));
  }
  return written;
}

}  // namespace fdaclip::harness
