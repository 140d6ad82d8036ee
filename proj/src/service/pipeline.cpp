#include "wcstlab/service/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "wcstlab/eeg/align.hpp"
#include "wcstlab/eeg/brainvision.hpp"
#include "wcstlab/eeg/montage.hpp"
#include "wcstlab/erp/adjacency.hpp"
#include "wcstlab/erp/average.hpp"
#include "wcstlab/erp/outputs.hpp"
#include "wcstlab/errors.hpp"
#include "wcstlab/random.hpp"
#include "wcstlab/signal/bands.hpp"
#include "wcstlab/signal/butterworth.hpp"
#include "wcstlab/signal/ica.hpp"
#include "wcstlab/signal/notch.hpp"
#include "wcstlab/signal/reference.hpp"

namespace wcst::service {

namespace fs = std::filesystem;

namespace {

template <typename F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, fmt::format("{}: {}", name, e.what()));
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

struct Participant {
  std::string id;
  std::vector<eeg::ChannelInfo> eeg_channels;
  std::map<std::string, Eigen::MatrixXd> deltas;  // per band
  Eigen::MatrixXd mean_a, mean_b;                  // broadband averages
  int n_trials = 0;
  int skipped = 0;
  int ica_rejected = 0;
  erp::TimeAxis axis;
};

Participant process(const PipelineConfig& cfg, std::size_t index, const std::vector<signal::BandDef>& bands) {
  const auto& in = cfg.participants[index];
  Participant out;
  out.id = in.id;
  const auto ctx = [&](std::string_view s) { return fmt::format("{} [{}]", s, in.id); };

  auto rec = stage(ctx("read"), [&] { return eeg::read_brainvision_file(cfg.resolve(in.header), cfg.eog_channels); });
  const auto log = stage(ctx("read"), [&] { return task::TrialLog::read_file(cfg.resolve(in.log)); });
  stage(ctx("validate"), [&] {
    cfg.validate_for_rate(rec.fs());
    return 0;
  });

  // Channels without stored coordinates fall back to the standard montage.
  auto channels = rec.channels();
  for (auto& c : channels) {
    if (!c.position) c.position = eeg::standard_position(c.name);
  }
  rec = eeg::Recording(rec.fs(), channels, rec.data(), rec.markers());

  rec = stage(ctx("align"), [&] {
    eeg::AlignOptions opt;
    opt.offset_s = cfg.log_offset_s;
    return eeg::align_behavior(rec, log, opt);
  });
  if (cfg.rereference) rec = stage(ctx("rereference"), [&] { return signal::rereference_common_average(rec); });
  if (cfg.notch.enabled) {
    rec = stage(ctx("notch"), [&] {
      signal::NotchOptions opt;
      opt.line_freq = cfg.notch.line_freq;
      opt.max_freq = cfg.notch.max_freq;
      opt.window_s = cfg.notch.window_s;
      opt.overlap = cfg.notch.overlap;
      return signal::notch_spectrum_fit(rec, opt);
    });
  }
  rec = stage(ctx("bandpass"),
              [&] { return signal::bandpass(rec, cfg.bandpass.lo, cfg.bandpass.hi, cfg.bandpass.order); });
  if (cfg.ica.enabled) {
    rec = stage(ctx("ica"), [&] {
      signal::IcaOptions opt;
      opt.variance_target = cfg.ica.variance_target;
      opt.seed = mix_seed(cfg.ica.seed, index);
      opt.tolerance = cfg.ica.tolerance;
      opt.max_iterations = cfg.ica.max_iterations;
      opt.r_threshold = cfg.ica.r_threshold;
      opt.fit_decimation = cfg.ica.fit_decimation;
      const auto model = signal::ica_fit(rec, opt);
      out.ica_rejected = static_cast<int>(model.rejected.size());
      return signal::ica_clean(rec, model, cfg.ica.r_threshold);
    });
  }
  for (auto i : rec.indices(eeg::ChannelRole::EEG)) out.eeg_channels.push_back(rec.channels()[i]);

  const erp::EpochWindow window{cfg.epoch.tmin, cfg.epoch.tmax};
  const auto [ca, cb] = cfg.epoch.conditions;
  const auto balance_seed = mix_seed(cfg.epoch.balance_seed, index);

  auto analyse = [&](const std::string& band, const eeg::Recording& r) {
    const auto set = stage(ctx("epoch/" + band), [&] { return erp::epoch(r, cfg.epoch.lock, in.id, window); });
    const auto [a, b] = stage(ctx("average/" + band), [&] { return erp::balance_and_average(set, ca, cb, balance_seed); });
    out.deltas[band] = erp::difference_wave(a, b);
    if (band == "broadband") {
      out.mean_a = a.mean;
      out.mean_b = b.mean;
      out.n_trials = a.n_trials;
      out.skipped = set.skipped;
      out.axis = set.axis;
    }
  };
  analyse("broadband", rec);
  for (const auto& band : bands) {
    const auto filtered = stage(ctx("band_split/" + band.name), [&] { return signal::bandpass(rec, band.lo, band.hi); });
    analyse(band.name, filtered);
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  stage("validate", [&] {
    config.validate();
    return 0;
  });
  const auto bands = config.effective_bands();
  for (const auto& p : config.participants) {
    stage("validate", [&] {
      for (const auto& path : {config.resolve(p.header), config.resolve(p.log)}) {
        if (!fs::exists(path)) throw InputError(fmt::format("participant {}: missing input '{}'", p.id, path));
      }
      return 0;
    });
  }

  std::vector<Participant> parts;
  for (std::size_t i = 0; i < config.participants.size(); ++i) parts.push_back(process(config, i, bands));

  const auto& ref = parts.front();
  std::vector<std::string> names;
  for (const auto& c : ref.eeg_channels) names.push_back(c.name);
  for (const auto& p : parts) {
    std::vector<std::string> other;
    for (const auto& c : p.eeg_channels) other.push_back(c.name);
    if (other != names) {
      throw StageError("group", fmt::format("group: participant {} has a different EEG channel set than {}", p.id, ref.id));
    }
    if (p.axis.n_samples != ref.axis.n_samples || p.axis.fs != ref.axis.fs) {
      throw StageError("group", fmt::format("group: participant {} has a different sampling rate than {}", p.id, ref.id));
    }
  }

  PipelineResult result;
  result.channel_names = names;
  result.axis = ref.axis;
  result.band_names.push_back("broadband");
  for (const auto& b : bands) result.band_names.push_back(b.name);

  const auto adjacency = stage("adjacency", [&] {
    return erp::build_adjacency(ref.eeg_channels, config.cluster.adjacency_threshold);
  });
  erp::ClusterOptions copt;
  copt.n_permutations = config.cluster.n_permutations;
  copt.cluster_alpha = config.cluster.cluster_alpha;
  copt.report_alpha = config.cluster.report_alpha;
  copt.seed = config.cluster.seed;

  std::vector<erp::TopoSeries> topo;
  for (const auto& band : result.band_names) {
    std::vector<Eigen::MatrixXd> deltas;
    for (const auto& p : parts) deltas.push_back(p.deltas.at(band));
    auto analysis = stage("cluster/" + band, [&] { return erp::cluster_permutation(deltas, adjacency, copt); });
    Eigen::MatrixXd mean_delta = Eigen::MatrixXd::Zero(deltas.front().rows(), deltas.front().cols());
    for (const auto& d : deltas) mean_delta += d;
    mean_delta /= static_cast<double>(deltas.size());
    stage("topo/" + band, [&] {
      const auto mask = erp::significance_mask(analysis);
      topo.push_back({band, "t", erp::topo_windows(analysis.t_values, result.axis, mask, config.topo)});
      topo.push_back({band, "delta", erp::topo_windows(mean_delta, result.axis, mask, config.topo)});
      return 0;
    });
    result.clusters.emplace(band, std::move(analysis));
  }

  stage("write", [&] {
    const fs::path dir = config.resolve(config.output_dir);
    fs::create_directories(dir);
    std::map<std::string, std::string> files;

    Eigen::MatrixXd grand_a = Eigen::MatrixXd::Zero(ref.mean_a.rows(), ref.mean_a.cols());
    Eigen::MatrixXd grand_b = grand_a;
    for (const auto& p : parts) {
      grand_a += p.mean_a;
      grand_b += p.mean_b;
    }
    grand_a /= static_cast<double>(parts.size());
    grand_b /= static_cast<double>(parts.size());
    const auto [ca, cb] = config.epoch.conditions;
    const std::vector<erp::Waveform> waves{{std::string(erp::to_string(ca)), grand_a},
                                           {std::string(erp::to_string(cb)), grand_b},
                                           {"DELTA", grand_a - grand_b}};
    files["erp_waveforms.csv"] = erp::erp_waveforms_csv(waves, names, result.axis);

    std::vector<erp::BandClusters> bc;
    for (const auto& band : result.band_names) bc.push_back({band, &result.clusters.at(band)});
    files["clusters.csv"] = erp::clusters_csv(bc, names, result.axis);
    files["clusters.json"] = erp::clusters_json(bc, names, result.axis).dump(2) + "\n";
    files["topography.json"] = erp::topography_json(topo, names).dump(2) + "\n";
    for (const auto& series : topo) {
      if (series.statistic == "t") files["topography_" + series.band + ".svg"] = erp::topo_svg(series, ref.eeg_channels);
    }

    nlohmann::ordered_json prov;
    prov["tool"] = "wcstlab";
    prov["version"] = kToolVersion;
    const auto canonical = config.to_json().dump();
    prov["config_sha256"] = sha256_hex(canonical);
    prov["config"] = config.to_json();
    prov["seeds"] = {{"ica", config.ica.seed}, {"balance", config.epoch.balance_seed}, {"cluster", config.cluster.seed}};
    auto inputs = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const auto& in = config.participants[i];
      nlohmann::ordered_json e;
      e["id"] = in.id;
      e["header_sha256"] = sha256_hex(read_text(config.resolve(in.header)));
      e["log_sha256"] = sha256_hex(read_text(config.resolve(in.log)));
      e["trials_per_condition"] = parts[i].n_trials;
      e["epochs_skipped"] = parts[i].skipped;
      e["ica_components_rejected"] = parts[i].ica_rejected;
      inputs.push_back(std::move(e));
    }
    prov["inputs"] = std::move(inputs);
    nlohmann::ordered_json outputs;
    for (const auto& [name, text] : files) outputs[name] = sha256_hex(text);
    prov["outputs"] = std::move(outputs);
    files["provenance.json"] = prov.dump(2) + "\n";

    for (const auto& [name, text] : files) {
      write_text(dir / name, text);
      result.written.push_back(name);
    }
    return 0;
  });
  return result;
}

}  // namespace wcst::service
