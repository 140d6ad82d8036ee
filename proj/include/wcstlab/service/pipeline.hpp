#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wcstlab/erp/cluster.hpp"
#include "wcstlab/service/pipeline_config.hpp"

namespace wcst::service {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct PipelineResult {
  std::vector<std::string> band_names;  // "broadband" first
  std::map<std::string, erp::ClusterAnalysis> clusters;
  std::vector<std::string> channel_names;
  erp::TimeAxis axis;
  std::vector<std::string> written;  // output file names, relative to output_dir
};

// Preprocess every participant (re-reference, notch, band-pass, ICA), split
// into bands, epoch, balance and average, then run the group cluster test per
// band and write the CSV/JSON/SVG outputs plus a provenance sidecar. Any
// failure is rethrown as StageError naming the stage.
PipelineResult run_pipeline(const PipelineConfig& config);

std::string sha256_hex(std::string_view data);

}  // namespace wcst::service
