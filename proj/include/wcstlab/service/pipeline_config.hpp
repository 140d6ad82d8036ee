#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wcstlab/erp/cluster.hpp"
#include "wcstlab/erp/epoch.hpp"
#include "wcstlab/erp/topo.hpp"
#include "wcstlab/signal/bands.hpp"

namespace wcst::service {

struct ParticipantInput {
  std::string id;
  std::string header;  // .vhdr path
  std::string log;     // trial log (JSONL) path
};

struct NotchConfig {
  bool enabled = true;
  double line_freq = 60.0;
  std::optional<double> max_freq;
  double window_s = 4.0;
  double overlap = 0.5;
};

struct BandpassConfig {
  double lo = 0.5;
  double hi = 100.0;
  int order = 4;
};

struct IcaConfig {
  bool enabled = true;
  double variance_target = 0.999;
  double r_threshold = 0.4;
  std::uint64_t seed = 0;
  double tolerance = 1e-6;
  int max_iterations = 500;
  int fit_decimation = 1;
};

struct EpochConfig {
  erp::Lock lock = erp::Lock::Stimulus;
  double tmin = -0.1;
  double tmax = 0.5;
  // The difference wave is conditions[0] - conditions[1].
  std::array<erp::Condition, 2> conditions{erp::Condition::Conf, erp::Condition::Search};
  std::uint64_t balance_seed = 0;
};

struct ClusterConfig {
  int n_permutations = 1000;
  double cluster_alpha = 0.05;
  double report_alpha = 0.1;
  std::uint64_t seed = 0;
  double adjacency_threshold = 0.4;
};

struct PipelineConfig {
  std::vector<ParticipantInput> participants;
  std::string output_dir = "analysis";
  std::vector<std::string> eog_channels{"TP9", "TP10"};
  double log_offset_s = 0.0;
  bool rereference = true;
  NotchConfig notch;
  BandpassConfig bandpass;
  IcaConfig ica;
  std::vector<signal::BandDef> bands;  // empty: the canonical five
  EpochConfig epoch;
  ClusterConfig cluster;
  erp::TopoSpec topo;

  // Directory relative paths are resolved against; not serialised.
  std::string base_dir;

  std::vector<signal::BandDef> effective_bands() const;
  std::string resolve(const std::string& path) const;

  // Checks every rate-independent bound. Throws ConfigError.
  void validate() const;
  // Checks the bounds that depend on the sampling rate.
  void validate_for_rate(double fs) const;

  nlohmann::ordered_json to_json() const;
  // Unknown keys are rejected. Throws ConfigError.
  static PipelineConfig from_json(const nlohmann::json& doc, std::string base_dir = {});
  static PipelineConfig load(const std::string& path);
};

}  // namespace wcst::service
