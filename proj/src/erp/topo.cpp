#include "wcstlab/erp/topo.hpp"

#include <cmath>

#include <fmt/format.h>

#include "wcstlab/errors.hpp"

namespace wcst::erp {

SignificanceMask significance_mask(const ClusterAnalysis& analysis) {
  SignificanceMask mask = SignificanceMask::Constant(analysis.t_values.rows(), analysis.t_values.cols(), false);
  for (const auto& c : analysis.clusters) {
    if (!c.significant) continue;
    for (const auto& m : c.members) mask(m.channel, m.sample) = true;
  }
  return mask;
}

std::vector<TopoWindow> topo_windows(const Eigen::MatrixXd& map, const TimeAxis& axis,
                                     const std::optional<SignificanceMask>& mask, const TopoSpec& spec) {
  if (!(spec.width_s > 0.0 && spec.start_s < spec.end_s)) {
    throw InputError(fmt::format("invalid topography range [{}, {}) step {}", spec.start_s, spec.end_s, spec.width_s));
  }
  if (map.cols() != axis.n_samples) {
    throw InputError(fmt::format("map has {} samples but the time axis {}", map.cols(), axis.n_samples));
  }
  if (mask && (mask->rows() != map.rows() || mask->cols() != map.cols())) {
    throw InputError("significance mask shape does not match the map");
  }
  // sample i stands for [t_i, t_i + 1/fs)
  const double covered_from = axis.time(0);
  const double covered_to = axis.time(axis.n_samples - 1) + 1.0 / axis.fs;
  if (spec.start_s < covered_from - 1e-9 || spec.end_s > covered_to + 1e-9) {
    throw InputError(fmt::format("time axis [{:.4f}, {:.4f}] s does not cover [{}, {}] s", axis.time(0),
                                 axis.time(axis.n_samples - 1), spec.start_s, spec.end_s));
  }

  const auto n_windows = static_cast<int>(std::llround((spec.end_s - spec.start_s) / spec.width_s));
  std::vector<TopoWindow> out;
  for (int w = 0; w < n_windows; ++w) {
    TopoWindow win;
    win.start_s = spec.start_s + w * spec.width_s;
    win.end_s = win.start_s + spec.width_s;
    // Samples whose time lies in [start, end).
    const auto first = std::llround(std::ceil(win.start_s * axis.fs - 1e-9)) - axis.offset;
    const auto last = std::llround(std::ceil(win.end_s * axis.fs - 1e-9)) - axis.offset;  // exclusive
    if (first < 0 || last > axis.n_samples || last <= first) {
      throw InputError(fmt::format("window [{}, {}) s has no samples on the axis", win.start_s, win.end_s));
    }
    win.values.resize(static_cast<std::size_t>(map.rows()));
    win.significant.assign(static_cast<std::size_t>(map.rows()), false);
    for (Eigen::Index c = 0; c < map.rows(); ++c) {
      win.values[static_cast<std::size_t>(c)] = map.row(c).segment(first, last - first).mean();
      if (mask) win.significant[static_cast<std::size_t>(c)] = mask->row(c).segment(first, last - first).any();
    }
    out.push_back(std::move(win));
  }
  return out;
}

}  // namespace wcst::erp
