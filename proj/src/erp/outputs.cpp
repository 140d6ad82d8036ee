#include "wcstlab/erp/outputs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "wcstlab/errors.hpp"

namespace wcst::erp {

namespace {

std::string join_channels(const std::vector<int>& idx, std::span<const std::string> names, char sep) {
  std::string out;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) out += sep;
    out += names[static_cast<std::size_t>(idx[i])];
  }
  return out;
}

// Blue-white-red, v in [-1, 1].
std::string diverging(double v) {
  v = std::clamp(v, -1.0, 1.0);
  auto lerp = [](double a, double b, double f) { return static_cast<int>(std::lround(a + (b - a) * f)); };
  int r, g, b;
  if (v >= 0) {
    r = lerp(255, 178, v);
    g = lerp(255, 24, v);
    b = lerp(255, 43, v);
  } else {
    r = lerp(255, 33, -v);
    g = lerp(255, 102, -v);
    b = lerp(255, 172, -v);
  }
  return fmt::format("#{:02X}{:02X}{:02X}", r, g, b);
}

}  // namespace

std::string erp_waveforms_csv(std::span<const Waveform> waves, std::span<const std::string> channels,
                              const TimeAxis& axis) {
  std::string out = "time_s,channel,condition,uv\n";
  for (const auto& w : waves) {
    if (w.data.rows() != static_cast<Eigen::Index>(channels.size()) || w.data.cols() != axis.n_samples) {
      throw InputError(fmt::format("waveform '{}' does not match the channel list / time axis", w.condition));
    }
    for (Eigen::Index c = 0; c < w.data.rows(); ++c) {
      for (Eigen::Index s = 0; s < w.data.cols(); ++s) {
        fmt::format_to(std::back_inserter(out), "{:.4f},{},{},{:.6f}\n", axis.time(s),
                       channels[static_cast<std::size_t>(c)], w.condition, w.data(c, s));
      }
    }
  }
  return out;
}

std::string clusters_csv(std::span<const BandClusters> bands, std::span<const std::string> channels,
                         const TimeAxis& axis) {
  std::string out = "band,cluster,polarity,mass,p_value,significant,t_start_s,t_end_s,n_cells,channels\n";
  for (const auto& b : bands) {
    int id = 0;
    for (const auto& c : b.analysis->clusters) {
      fmt::format_to(std::back_inserter(out), "{},{},{},{:.6f},{:.6f},{},{:.4f},{:.4f},{},{}\n", b.band, id++,
                     to_string(c.polarity), c.mass, c.p_value, c.significant ? "true" : "false",
                     axis.time(c.first_sample), axis.time(c.last_sample), c.members.size(),
                     join_channels(c.channels, channels, ';'));
    }
  }
  return out;
}

nlohmann::ordered_json clusters_json(std::span<const BandClusters> bands, std::span<const std::string> channels,
                                     const TimeAxis& axis) {
  auto doc = nlohmann::ordered_json::array();
  for (const auto& b : bands) {
    const auto& a = *b.analysis;
    nlohmann::ordered_json band;
    band["band"] = b.band;
    band["threshold_t"] = a.threshold;
    band["df"] = a.df;
    band["n_permutations"] = a.n_permutations;
    auto list = nlohmann::ordered_json::array();
    for (const auto& c : a.clusters) {
      nlohmann::ordered_json j;
      j["polarity"] = to_string(c.polarity);
      j["mass"] = c.mass;
      j["p_value"] = c.p_value;
      j["significant"] = c.significant;
      j["t_start_s"] = axis.time(c.first_sample);
      j["t_end_s"] = axis.time(c.last_sample);
      auto names = nlohmann::ordered_json::array();
      for (int ch : c.channels) names.push_back(channels[static_cast<std::size_t>(ch)]);
      j["channels"] = std::move(names);
      auto cells = nlohmann::ordered_json::array();
      for (const auto& m : c.members) cells.push_back({m.channel, m.sample});
      j["cells"] = std::move(cells);
      list.push_back(std::move(j));
    }
    band["clusters"] = std::move(list);
    doc.push_back(std::move(band));
  }
  return doc;
}

nlohmann::ordered_json topography_json(std::span<const TopoSeries> series, std::span<const std::string> channels) {
  auto doc = nlohmann::ordered_json::array();
  for (const auto& s : series) {
    for (const auto& w : s.windows) {
      nlohmann::ordered_json j;
      j["band"] = s.band;
      j["statistic"] = s.statistic;
      j["window_start_s"] = w.start_s;
      j["window_end_s"] = w.end_s;
      nlohmann::ordered_json values;
      auto sig = nlohmann::ordered_json::array();
      for (std::size_t c = 0; c < channels.size(); ++c) {
        values[channels[c]] = w.values[c];
        if (w.significant[c]) sig.push_back(channels[c]);
      }
      j["values"] = std::move(values);
      j["significant"] = std::move(sig);
      doc.push_back(std::move(j));
    }
  }
  return doc;
}

std::string topo_svg(const TopoSeries& series, std::span<const eeg::ChannelInfo> channels) {
  constexpr double disc = 80.0;
  constexpr double pad = 15.0;
  const double cell = 2 * disc + 2 * pad;
  const auto n = series.windows.size();
  double vmax = 0.0;
  for (const auto& w : series.windows)
    for (double v : w.values) vmax = std::max(vmax, std::abs(v));
  if (vmax <= 0.0) vmax = 1.0;

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\">\n",
      cell * static_cast<double>(n), cell + 20, cell * static_cast<double>(n), cell + 20);
  fmt::format_to(std::back_inserter(out), "<text x=\"4\" y=\"14\" font-size=\"12\">{} {} (scale \xC2\xB1{:.3g})</text>\n",
                 series.band, series.statistic, vmax);
  for (std::size_t w = 0; w < n; ++w) {
    const auto& win = series.windows[w];
    const double cx = cell * static_cast<double>(w) + cell / 2;
    const double cy = 20 + cell / 2;
    fmt::format_to(std::back_inserter(out),
                   "<g><circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"{:.1f}\" fill=\"none\" stroke=\"#444\"/>"
                   "<polygon points=\"{:.1f},{:.1f} {:.1f},{:.1f} {:.1f},{:.1f}\" fill=\"none\" stroke=\"#444\"/>"
                   "<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\" text-anchor=\"middle\">{:.0f}-{:.0f} ms</text>\n",
                   cx, cy, disc, cx - 8, cy - disc, cx, cy - disc - 10, cx + 8, cy - disc, cx, cy + disc + 13,
                   win.start_s * 1000, win.end_s * 1000);
    for (std::size_t c = 0; c < channels.size() && c < win.values.size(); ++c) {
      if (!channels[c].position) continue;
      const auto& p = *channels[c].position;
      // Azimuthal equidistant projection; the equator lands on the rim.
      const double theta = std::acos(std::clamp(p.z, -1.0, 1.0));
      const double rho = theta / (std::numbers::pi / 2) * disc;
      const double phi = std::atan2(p.y, p.x);
      const double x = cx + rho * std::cos(phi);
      const double y = cy - rho * std::sin(phi);
      const bool sig = win.significant[c];
      fmt::format_to(std::back_inserter(out),
                     "<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"7\" fill=\"{}\" stroke=\"#000\" stroke-width=\"{}\">"
                     "<title>{} {:.4g}</title></circle>\n",
                     x, y, diverging(win.values[c] / vmax), sig ? 2.5 : 0.5, channels[c].name, win.values[c]);
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace wcst::erp
