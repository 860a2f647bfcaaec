/**
 * @file harness.hpp
 * @brief Dataset manifests, run configuration, evaluation runs, threshold
 * sweeps and mask export.
 *
 * Output layout under RunConfig::output_dir:
 *
 *     report.json   retrieval report of the last `eval`
 *     sweep.csv     tau,t2v_r_at_1,v2t_r_at_1,white_fraction
 *     masks/<video_id>_<frame_idx>.pgm
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fdaclip/encode.hpp"
#include "fdaclip/ingest.hpp"
#include "fdaclip/maskgen.hpp"
#include "fdaclip/retrieval.hpp"

namespace fdaclip::harness {

enum class Split { Train, Test };

struct ManifestEntry {
  std::string video_id;
  std::filesystem::path frame_dir;  // resolved against the manifest's directory
  std::vector<std::string> captions;
  Split split = Split::Test;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  [[nodiscard]] const ManifestEntry* find(std::string_view video_id) const;
  [[nodiscard]] std::vector<const ManifestEntry*> split(Split s) const;
};

/**
 * Accepts {"videos": [...]} or a bare array of
 * {"video_id", "frame_dir", "captions": [...], "split": "train"|"test"}.
 * Missing split defaults to test. Throws ConfigError.
 */
DatasetManifest parse_manifest(const nlohmann::json& j, const std::filesystem::path& base_dir);
DatasetManifest load_manifest(const std::filesystem::path& path);

enum class BackendKind { Mock, Planted, Store, External };

struct BackendConfig {
  BackendKind kind = BackendKind::Mock;
  std::size_t dim = encode::kDefaultDim;
  double noise = 0.0;                 // planted
  std::filesystem::path store_path;   // store
  std::string command;                // external
};

struct RunConfig {
  std::filesystem::path manifest_path;
  std::filesystem::path output_dir = "out";
  maskgen::MaskConfig mask;
  std::size_t n_frames_train = ingest::kTrainFrames;
  std::size_t n_frames_test = ingest::kTestFrames;
  std::string frame_pattern = "*.p[pg]m";
  BackendConfig backend;
  std::uint64_t seed = 0;

  void validate() const;
  [[nodiscard]] std::size_t frames_for(Split s) const { return s == Split::Train ? n_frames_train : n_frames_test; }
};

/// Relative paths inside @p j resolve against @p base_dir. Throws ConfigError.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

/// Per-component seed derived from the run seed and a component name.
std::uint64_t derive_seed(std::uint64_t run_seed, std::string_view component);

/// Builds the configured backend; planted uses the test-split captions.
std::unique_ptr<encode::EncoderBackend> make_backend(const RunConfig& config, const DatasetManifest& manifest);

/// Sampled frames, their masks and their source indices for one video.
struct PreparedVideo {
  std::string video_id;
  std::vector<std::size_t> frame_indices;
  ingest::FrameSequence frames;
  std::vector<BinaryMask> masks;
};

PreparedVideo prepare_video(const ManifestEntry& entry, const RunConfig& config);

struct EvalOutcome {
  retrieval::RetrievalReport report;
  retrieval::SimilarityMatrix similarity;
  double white_fraction = 0.0;  // mean over every generated mask
  std::size_t n_videos = 0;
  std::size_t n_texts = 0;
};

/// Runs the test split end to end with @p backend. Writes nothing.
EvalOutcome evaluate_run(const RunConfig& config, const DatasetManifest& manifest, encode::EncoderBackend& backend);
EvalOutcome evaluate_run(const RunConfig& config);

nlohmann::json report_document(const EvalOutcome& outcome, const RunConfig& config);

/// evaluate_run, then writes <output_dir>/report.json.
retrieval::RetrievalReport run_eval(const RunConfig& config);

struct SweepRow {
  int tau = 0;
  double t2v_r_at_1 = 0.0;
  double v2t_r_at_1 = 0.0;
  double white_fraction = 0.0;
};

std::vector<SweepRow> tau_sweep(const RunConfig& config, const std::vector<int>& taus);
std::string sweep_csv(const std::vector<SweepRow>& rows);
/// tau_sweep, then writes <output_dir>/sweep.csv.
std::vector<SweepRow> run_sweep(const RunConfig& config, const std::vector<int>& taus);

/// Writes one P5 mask per sampled frame; returns the written paths.
std::vector<std::filesystem::path> export_masks(const RunConfig& config, std::string_view video_id);

}  // namespace fdaclip::harness
