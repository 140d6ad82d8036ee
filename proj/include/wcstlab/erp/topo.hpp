#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "wcstlab/erp/cluster.hpp"
#include "wcstlab/erp/epoch.hpp"

namespace wcst::erp {

struct TopoSpec {
  double start_s = 0.05;
  double end_s = 0.50;
  double width_s = 0.05;
};

struct TopoWindow {
  double start_s = 0.0;
  double end_s = 0.0;
  std::vector<double> values;     // per channel time-mean over [start, end)
  std::vector<bool> significant;  // per channel
};

using SignificanceMask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Cells belonging to significant clusters.
SignificanceMask significance_mask(const ClusterAnalysis& analysis);

// A channel is marked significant in a window if any of its masked samples
// falls inside it. Throws InputError when the axis does not cover the range.
std::vector<TopoWindow> topo_windows(const Eigen::MatrixXd& map, const TimeAxis& axis,
                                     const std::optional<SignificanceMask>& mask = std::nullopt,
                                     const TopoSpec& spec = {});

}  // namespace wcst::erp
