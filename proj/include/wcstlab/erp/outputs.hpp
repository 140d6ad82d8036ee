#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "wcstlab/eeg/recording.hpp"
#include "wcstlab/erp/cluster.hpp"
#include "wcstlab/erp/epoch.hpp"
#include "wcstlab/erp/topo.hpp"

namespace wcst::erp {

struct Waveform {
  std::string condition;  // CONF, SEARCH, COR, INC or DELTA
  Eigen::MatrixXd data;   // channels x samples
};

// time_s,channel,condition,uv
std::string erp_waveforms_csv(std::span<const Waveform> waves, std::span<const std::string> channels,
                              const TimeAxis& axis);

struct BandClusters {
  std::string band;
  const ClusterAnalysis* analysis = nullptr;
};

std::string clusters_csv(std::span<const BandClusters> bands, std::span<const std::string> channels,
                         const TimeAxis& axis);
nlohmann::ordered_json clusters_json(std::span<const BandClusters> bands, std::span<const std::string> channels,
                                     const TimeAxis& axis);

struct TopoSeries {
  std::string band;
  std::string statistic;  // "t" or "delta"
  std::vector<TopoWindow> windows;
};

nlohmann::ordered_json topography_json(std::span<const TopoSeries> series, std::span<const std::string> channels);

// Row of flat-disc maps (azimuthal projection, nose up), one per window,
// linear diverging colour scale symmetric about zero. Significant channels
// get a heavy outline.
std::string topo_svg(const TopoSeries& series, std::span<const eeg::ChannelInfo> channels);

}  // namespace wcst::erp
