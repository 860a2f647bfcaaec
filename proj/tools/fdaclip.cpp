/**
 * @file fdaclip.cpp
 * @brief Command-line front end: eval, sweep, masks, pack-store,
 * inspect-store, synth.
 *
 * Exit codes: 0 success, 1 usage/config error, 2 data error, 3 backend error.
 */
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "fdaclip/embedding_store.hpp"
#include "fdaclip/harness.hpp"
#include "fdaclip/synthetic.hpp"

namespace {

using namespace fdaclip;
using nlohmann::json;

int pack_store(const std::string& input, const std::string& output) {
  std::ifstream in(input);
  if (!in) throw ConfigError("cannot open " + input);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(input + ": " + e.what());
  }
  std::vector<std::pair<std::string, std::vector<float>>> records;
  try {
    if (j.is_object()) {
      for (auto it = j.begin(); it != j.end(); ++it) records.emplace_back(it.key(), it.value().get<std::vector<float>>());
    } else if (j.is_array()) {
      for (const auto& r : j) records.emplace_back(r.at("id").get<std::string>(), r.at("values").get<std::vector<float>>());
    } else {
      throw DataError(input + ": expected an object or an array of records");
    }
  } catch (const json::exception& e) {
    throw DataError(input + ": " + e.what());
  }
  if (records.empty()) throw DataError(input + ": no records");
  encode::EmbeddingStore store(static_cast<std::uint32_t>(records.front().second.size()));
  for (auto& [id, values] : records) store.add(std::move(id), std::move(values));
  encode::save_embedding_store(store, output);
  std::cout << "wrote " << store.size() << " records (dim " << store.dim() << ") to " << output << "\n";
  return 0;
}

int inspect_store(const std::string& path, bool with_ids) {
  auto store = encode::load_embedding_store(path);
  json out = {{"version", encode::kStoreVersion}, {"dim", store.dim()}, {"count", store.size()}};
  if (with_ids) {
    json ids = json::array();
    for (const auto& r : store.records()) ids.push_back(r.id);
    out["ids"] = ids;
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frame-difference masks and text-video retrieval evaluation"};
  app.require_subcommand(1);

  std::string config_path;
  auto* eval = app.add_subcommand("eval", "Evaluate the test split and write report.json");
  eval->add_option("--config", config_path, "Run configuration (JSON)")->required();

  std::vector<int> taus{0, 1, 25, 100, 255};
  auto* sweep = app.add_subcommand("sweep", "Evaluate over several thresholds and write sweep.csv");
  sweep->add_option("--config", config_path, "Run configuration (JSON)")->required();
  sweep->add_option("--taus", taus, "Comma-separated thresholds")->delimiter(',')->check(CLI::Range(0, 255));

  std::string video_id;
  auto* masks = app.add_subcommand("masks", "Export the masks of one video as P5 graymaps");
  masks->add_option("--config", config_path, "Run configuration (JSON)")->required();
  masks->add_option("--video", video_id, "video_id from the manifest")->required();

  std::string input, output;
  auto* pack = app.add_subcommand("pack-store", "Pack JSON vectors into an embedding store");
  pack->add_option("--input", input, "JSON object id -> [floats], or array of {id, values}")->required();
  pack->add_option("--output", output, "Store file to write")->required();

  std::string store_path;
  bool with_ids = false;
  auto* inspect = app.add_subcommand("inspect-store", "Print an embedding store header");
  inspect->add_option("store", store_path, "Store file")->required();
  inspect->add_flag("--ids", with_ids, "Also list record ids");

  std::string synth_dir;
  synthetic::DatasetSpec synth_spec;
  auto* synth = app.add_subcommand("synth", "Write a synthetic moving-square dataset with manifest");
  synth->add_option("--out", synth_dir, "Destination directory")->required();
  synth->add_option("--videos", synth_spec.videos, "Number of videos");
  synth->add_option("--captions", synth_spec.captions_per_video, "Captions per video");
  synth->add_option("--frames", synth_spec.frames, "Frames per video");
  synth->add_option("--seed", synth_spec.seed, "Noise seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*eval) {
      auto report = harness::run_eval(harness::load_run_config(config_path));
      std::cout << retrieval::to_json(report).dump(2) << "\n";
    } else if (*sweep) {
      auto rows = harness::run_sweep(harness::load_run_config(config_path), taus);
      std::cout << harness::sweep_csv(rows);
    } else if (*masks) {
      for (const auto& p : harness::export_masks(harness::load_run_config(config_path), video_id)) {
        std::cout << p.string() << "\n";
      }
    } else if (*pack) {
      return pack_store(input, output);
    } else if (*inspect) {
      return inspect_store(store_path, with_ids);
    } else if (*synth) {
      std::cout << synthetic::write_dataset(synth_dir, synth_spec).string() << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
