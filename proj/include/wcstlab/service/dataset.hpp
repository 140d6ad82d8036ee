#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wcst::service {

// Synthetic multi-participant study: behaviour from a lapsing
// hypothesis-testing agent, EEG from the synth defaults plus line noise and
// an optional stimulus-locked SEARCH-only deflection.
struct DatasetSpec {
  int n_participants = 5;
  std::uint64_t seed = 0;
  double fs = 1000.0;
  int n_blocks = 12;
  double lapse_rate = 0.1;
  double line_noise_uv = 5.0;  // per harmonic at 60/120/180 Hz; 0 disables
  bool search_effect = true;
  double effect_uv = 8.0;
  double effect_latency_s = 0.2;
  double effect_width_s = 0.05;
  std::vector<std::string> effect_channels{"CP1", "CP2", "Pz"};
  // Written into the generated pipeline config.
  int ica_fit_decimation = 1;
  int n_permutations = 1000;
};

struct DatasetResult {
  std::string config_path;  // pipeline.json
  std::vector<std::string> participant_ids;
};

// Writes pNN.vhdr/.vmrk/.eeg, pNN.jsonl and pNN.manifest.json per participant
// plus a ready-to-run pipeline.json into `out_dir`.
DatasetResult write_dataset(const DatasetSpec& spec, const std::string& out_dir);

}  // namespace wcst::service
