#include "wcstlab/synth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "wcstlab/eeg/montage.hpp"
#include "wcstlab/errors.hpp"
#include "wcstlab/metrics/metrics.hpp"
#include "wcstlab/random.hpp"
#include "wcstlab/synth/noise.hpp"

namespace wcst::synth {

namespace {

constexpr double kBlinkDuration = 0.4;

constexpr std::array<std::pair<ComponentKind, std::string_view>, 6> kKindNames{{
    {ComponentKind::ErpFrn, "erp_frn"},
    {ComponentKind::ErpP300, "erp_p300"},
    {ComponentKind::BandBurst, "band_burst"},
    {ComponentKind::Blink, "blink"},
    {ComponentKind::LineNoise, "line_noise"},
    {ComponentKind::PinkNoise, "pink_noise"},
}};

double gaussian(double t, double mu, double width) {
  const double z = (t - mu) / width;
  return std::exp(-0.5 * z * z);
}

double default_latency(ComponentKind k) {
  switch (k) {
    case ComponentKind::ErpFrn: return 0.2;
    case ComponentKind::ErpP300: return 0.35;
    default: return 0.3;
  }
}

double default_width(ComponentKind k) { return k == ComponentKind::ErpFrn ? 0.05 : 0.1; }

}  // namespace

std::string_view to_string(ComponentKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

ComponentKind component_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw ConfigError(fmt::format("unknown component kind '{}'", name));
}

void SynthSpec::validate() const {
  if (!(fs > 0.0)) throw ConfigError(fmt::format("fs must be > 0 (got {})", fs));
  if (!(duration_s > 0.0)) throw ConfigError(fmt::format("duration_s must be > 0 (got {})", duration_s));
  for (const auto& c : components) {
    const auto kind = to_string(c.kind);
    if (!(c.amplitude >= 0.0)) throw ConfigError(fmt::format("{} amplitude must be >= 0 (got {})", kind, c.amplitude));
    if (!(c.white_fraction >= 0.0) || !(c.modulation >= 0.0)) {
      throw ConfigError(fmt::format("{} white_fraction and modulation must be >= 0", kind));
    }
    if (c.width_s && !(*c.width_s > 0.0)) throw ConfigError(fmt::format("{} width_s must be > 0", kind));
    if (c.latency_s && !(*c.latency_s >= 0.0 && *c.latency_s < duration_s)) {
      throw ConfigError(fmt::format("{} latency_s must lie within the recording", kind));
    }
    if (c.kind == ComponentKind::Blink && !(c.interval_s > kBlinkDuration)) {
      throw ConfigError(fmt::format("blink interval_s must exceed {} s", kBlinkDuration));
    }
    if (c.kind == ComponentKind::LineNoise && (c.harmonics < 1 || !(c.line_freq > 0.0))) {
      throw ConfigError("line_noise needs line_freq > 0 and harmonics >= 1");
    }
    if (c.kind == ComponentKind::BandBurst && !(c.frequency_hz > 0.0 && c.frequency_hz < fs / 2)) {
      throw ConfigError(fmt::format("band_burst frequency must lie in (0, fs/2) (got {})", c.frequency_hz));
    }
    for (const auto& [cond, gain] : c.condition_gain) {
      if (cond != "CONF" && cond != "SEARCH" && cond != "COR" && cond != "INC") {
        throw ConfigError(fmt::format("{}: unknown condition '{}'", kind, cond));
      }
      if (!(gain >= 0.0)) throw ConfigError(fmt::format("{}: gain for {} must be >= 0", kind, cond));
    }
  }
}

SynthSpec default_spec(std::uint64_t seed, double duration_s, double fs) {
  SynthSpec s;
  s.seed = seed;
  s.duration_s = duration_s;
  s.fs = fs;

  ComponentSpec pink;
  pink.kind = ComponentKind::PinkNoise;
  pink.amplitude = 10.0;
  s.components.push_back(pink);

  ComponentSpec blink;
  blink.kind = ComponentKind::Blink;
  blink.amplitude = 150.0;
  blink.interval_s = 3.0;
  s.components.push_back(blink);

  ComponentSpec frn;
  frn.kind = ComponentKind::ErpFrn;
  frn.amplitude = 6.0;
  frn.lock = EventLock::Feedback;
  frn.condition_gain = {{"INC", 1.0}};
  frn.channels = {"Fz", "FC1", "FC2", "Cz"};
  s.components.push_back(frn);

  ComponentSpec p300;
  p300.kind = ComponentKind::ErpP300;
  p300.amplitude = 8.0;
  p300.lock = EventLock::Feedback;
  p300.condition_gain = {{"COR", 1.0}, {"INC", 0.5}};
  p300.channels = {"Cz", "CP1", "CP2", "Pz"};
  s.components.push_back(p300);
  return s;
}

double blink_template(double t) {
  if (t < 0.0 || t >= kBlinkDuration) return 0.0;
  auto raw = [](double x) { return gaussian(x, 0.12, 0.04) - 0.3 * gaussian(x, 0.26, 0.06); };
  static const double peak = raw(0.12);
  return raw(t) / peak;
}

double blink_weight(std::string_view channel) {
  static const std::map<std::string, double, std::less<>> table{
      {"TP9", 1.0}, {"TP10", 1.0}, {"Fp1", 1.0}, {"Fp2", 1.0}, {"F7", 0.6},  {"F8", 0.6},
      {"F3", 0.5},  {"Fz", 0.5},   {"F4", 0.5},  {"FC1", 0.25}, {"FC2", 0.25}, {"FC5", 0.25}, {"FC6", 0.25}};
  const auto it = table.find(channel);
  return it == table.end() ? 0.0 : it->second;
}

std::vector<double> entry_waveform(const ManifestEntry& e, double fs) {
  const auto n = std::max<std::int64_t>(e.end_sample - e.start_sample, 0);
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t s = e.start_sample + i;
    double v = 0.0;
    switch (e.kind) {
      case ComponentKind::ErpFrn:
        v = -e.amplitude * gaussian(static_cast<double>(s - e.event_sample) / fs, e.latency_s, e.width_s);
        break;
      case ComponentKind::ErpP300:
        v = e.amplitude * gaussian(static_cast<double>(s - e.event_sample) / fs, e.latency_s, e.width_s);
        break;
      case ComponentKind::BandBurst: {
        const double t = static_cast<double>(s - e.event_sample) / fs - e.latency_s;
        v = e.amplitude * std::sin(2.0 * std::numbers::pi * e.frequency_hz * t) * gaussian(t, 0.0, e.width_s);
        break;
      }
      case ComponentKind::Blink:
        v = e.amplitude * blink_template(static_cast<double>(i) / fs);
        break;
      case ComponentKind::LineNoise: {
        const double t = static_cast<double>(s) / fs;
        for (std::size_t h = 0; h < e.phases.size(); ++h) {
          v += e.amplitude *
               std::sin(2.0 * std::numbers::pi * e.frequency_hz * static_cast<double>(h + 1) * t + e.phases[h]);
        }
        break;
      }
      case ComponentKind::PinkNoise:
        break;
    }
    w[static_cast<std::size_t>(i)] = v;
  }
  return w;
}

eeg::Matrix render(const Manifest& m) {
  eeg::Matrix out = eeg::Matrix::Zero(static_cast<Eigen::Index>(m.channel_names.size()), m.n_samples);
  std::map<std::string, Eigen::Index, std::less<>> row;
  for (std::size_t i = 0; i < m.channel_names.size(); ++i) row[m.channel_names[i]] = static_cast<Eigen::Index>(i);
  for (const auto& e : m.entries) {
    if (e.stochastic()) continue;
    const auto w = entry_waveform(e, m.fs);
    for (std::size_t c = 0; c < e.channels.size(); ++c) {
      const auto r = row.at(e.channels[c]);
      const double g = e.weights[c];
      for (std::size_t i = 0; i < w.size(); ++i) out(r, e.start_sample + static_cast<Eigen::Index>(i)) += g * w[i];
    }
  }
  return out;
}

eeg::Matrix render_noise(const Manifest& m) {
  eeg::Matrix out = eeg::Matrix::Zero(static_cast<Eigen::Index>(m.channel_names.size()), m.n_samples);
  std::map<std::string, Eigen::Index, std::less<>> row;
  for (std::size_t i = 0; i < m.channel_names.size(); ++i) row[m.channel_names[i]] = static_cast<Eigen::Index>(i);
  for (const auto& e : m.entries) {
    if (!e.stochastic()) continue;
    for (std::size_t c = 0; c < e.channels.size(); ++c) {
      const auto r = row.at(e.channels[c]);
      Rng rng(mix_seed(e.seed, row.at(e.channels[c])));
      auto pink = pink_noise(static_cast<std::size_t>(m.n_samples), 1.0, rng);
      const auto env = slow_envelope(pink.size(), m.fs, e.modulation, rng);
      double ss = 0.0;
      for (std::size_t i = 0; i < pink.size(); ++i) {
        pink[i] *= env[i];
        ss += pink[i] * pink[i];
      }
      const double scale = ss > 0.0 ? e.amplitude * e.weights[c] / std::sqrt(ss / static_cast<double>(pink.size())) : 0.0;
      for (double& v : pink) v *= scale;
      const double sigma = e.white_fraction * e.amplitude * e.weights[c];
      std::normal_distribution<double> white;
      for (Eigen::Index i = 0; i < m.n_samples; ++i) {
        out(r, i) += pink[static_cast<std::size_t>(i)] + (sigma > 0.0 ? sigma * white(rng) : 0.0);
      }
    }
  }
  return out;
}

nlohmann::ordered_json Manifest::to_json() const {
  nlohmann::ordered_json doc;
  doc["format"] = "wcst-synth-manifest";
  doc["version"] = 1;
  doc["fs"] = fs;
  doc["n_samples"] = n_samples;
  doc["channels"] = channel_names;
  auto list = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(e.kind);
    j["channels"] = e.channels;
    j["weights"] = e.weights;
    j["start_sample"] = e.start_sample;
    j["end_sample"] = e.end_sample;
    j["event_sample"] = e.event_sample;
    j["trial"] = e.trial;
    j["condition"] = e.condition;
    j["amplitude"] = e.amplitude;
    j["latency_s"] = e.latency_s;
    j["width_s"] = e.width_s;
    j["frequency_hz"] = e.frequency_hz;
    j["phases"] = e.phases;
    j["white_fraction"] = e.white_fraction;
    j["modulation"] = e.modulation;
    j["seed"] = e.seed;
    list.push_back(std::move(j));
  }
  doc["entries"] = std::move(list);
  return doc;
}

Manifest Manifest::from_json(const nlohmann::json& doc) {
  try {
    Manifest m;
    m.fs = doc.at("fs").get<double>();
    m.n_samples = doc.at("n_samples").get<std::int64_t>();
    m.channel_names = doc.at("channels").get<std::vector<std::string>>();
    for (const auto& j : doc.at("entries")) {
      ManifestEntry e;
      e.kind = component_kind_from_string(j.at("kind").get<std::string>());
      e.channels = j.at("channels").get<std::vector<std::string>>();
      e.weights = j.at("weights").get<std::vector<double>>();
      e.start_sample = j.at("start_sample").get<std::int64_t>();
      e.end_sample = j.at("end_sample").get<std::int64_t>();
      e.event_sample = j.at("event_sample").get<std::int64_t>();
      e.trial = j.at("trial").get<int>();
      e.condition = j.at("condition").get<std::string>();
      e.amplitude = j.at("amplitude").get<double>();
      e.latency_s = j.at("latency_s").get<double>();
      e.width_s = j.at("width_s").get<double>();
      e.frequency_hz = j.at("frequency_hz").get<double>();
      e.phases = j.at("phases").get<std::vector<double>>();
      e.white_fraction = j.at("white_fraction").get<double>();
      e.modulation = j.at("modulation").get<double>();
      e.seed = j.at("seed").get<std::uint64_t>();
      m.entries.push_back(std::move(e));
    }
    return m;
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(fmt::format("malformed synth manifest: {}", ex.what()));
  }
}

SynthResult generate(const SynthSpec& spec, const task::TrialLog& log) {
  spec.validate();
  const auto channels = spec.channel_names.empty() ? eeg::default_channels(spec.eog_labels)
                                                   : eeg::make_channels(spec.channel_names, spec.eog_labels);
  Manifest m;
  m.fs = spec.fs;
  m.n_samples = std::llround(spec.duration_s * spec.fs);
  for (const auto& c : channels) m.channel_names.push_back(c.name);

  std::vector<std::string> eeg_names;
  for (const auto& c : channels) {
    if (c.role == eeg::ChannelRole::EEG) eeg_names.push_back(c.name);
  }
  auto resolve = [&](const ComponentSpec& comp, const std::vector<std::string>& fallback) {
    const auto& names = comp.channels.empty() ? fallback : comp.channels;
    for (const auto& n : names) {
      if (std::find(m.channel_names.begin(), m.channel_names.end(), n) == m.channel_names.end()) {
        throw ConfigError(fmt::format("{} targets unknown channel '{}'", to_string(comp.kind), n));
      }
    }
    return names;
  };

  const auto phases = log.empty() ? std::vector<metrics::TrialPhase>{} : metrics::classify_phases(log);
  const auto& records = log.records();

  for (std::size_t ci = 0; ci < spec.components.size(); ++ci) {
    const auto& comp = spec.components[ci];
    Rng rng(mix_seed(spec.seed, 1000 + ci));

    if (comp.kind == ComponentKind::PinkNoise) {
      ManifestEntry e;
      e.kind = comp.kind;
      e.channels = resolve(comp, m.channel_names);
      e.weights.assign(e.channels.size(), 1.0);
      e.start_sample = 0;
      e.end_sample = m.n_samples;
      e.amplitude = comp.amplitude;
      e.white_fraction = comp.white_fraction;
      e.modulation = comp.modulation;
      e.seed = mix_seed(spec.seed, ci);
      m.entries.push_back(std::move(e));
    } else if (comp.kind == ComponentKind::LineNoise) {
      ManifestEntry e;
      e.kind = comp.kind;
      e.channels = resolve(comp, m.channel_names);
      e.weights.assign(e.channels.size(), 1.0);
      e.start_sample = 0;
      e.end_sample = m.n_samples;
      e.amplitude = comp.amplitude;
      e.frequency_hz = comp.line_freq;
      std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
      for (int h = 0; h < comp.harmonics; ++h) e.phases.push_back(phase(rng));
      m.entries.push_back(std::move(e));
    } else if (comp.kind == ComponentKind::Blink) {
      std::vector<std::string> names;
      std::vector<double> weights;
      for (const auto& n : m.channel_names) {
        if (const double w = blink_weight(n); w > 0.0) {
          names.push_back(n);
          weights.push_back(w);
        }
      }
      std::uniform_real_distribution<double> jitter(0.5, 1.5);
      const auto len = std::llround(kBlinkDuration * spec.fs);
      double t = comp.interval_s * jitter(rng);
      while (t + kBlinkDuration < spec.duration_s) {
        ManifestEntry e;
        e.kind = comp.kind;
        e.channels = names;
        e.weights = weights;
        e.start_sample = std::llround(t * spec.fs);
        e.end_sample = std::min<std::int64_t>(e.start_sample + len, m.n_samples);
        e.amplitude = comp.amplitude;
        e.width_s = kBlinkDuration;
        m.entries.push_back(std::move(e));
        t += comp.interval_s * jitter(rng);
      }
    } else {
      const auto names = resolve(comp, eeg_names);
      const double lat = comp.latency_s.value_or(default_latency(comp.kind));
      const double width = comp.width_s.value_or(default_width(comp.kind));
      for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        std::string cond;
        double t_event;
        if (comp.lock == EventLock::Stimulus) {
          cond = phases[i] == metrics::TrialPhase::Search ? "SEARCH" : "CONF";
          t_event = r.times.stimulus_on;
        } else {
          cond = r.correct ? "COR" : "INC";
          t_event = r.times.feedback_on;
        }
        double gain = 1.0;
        if (!comp.condition_gain.empty()) {
          const auto it = comp.condition_gain.find(cond);
          gain = it == comp.condition_gain.end() ? 0.0 : it->second;
        }
        if (gain == 0.0 || comp.amplitude == 0.0) continue;
        ManifestEntry e;
        e.kind = comp.kind;
        e.channels = names;
        e.weights.assign(names.size(), 1.0);
        e.event_sample = eeg::nearest_sample(t_event + spec.log_offset_s, spec.fs);
        e.start_sample = std::clamp<std::int64_t>(e.event_sample + std::llround((lat - 4 * width) * spec.fs), 0, m.n_samples);
        e.end_sample =
            std::clamp<std::int64_t>(e.event_sample + std::llround((lat + 4 * width) * spec.fs) + 1, 0, m.n_samples);
        e.trial = r.spec.trial_index;
        e.condition = cond;
        e.amplitude = comp.amplitude * gain;
        e.latency_s = lat;
        e.width_s = width;
        e.frequency_hz = comp.kind == ComponentKind::BandBurst ? comp.frequency_hz : 0.0;
        m.entries.push_back(std::move(e));
      }
    }
  }

  eeg::Matrix data = render(m);
  data += render_noise(m);
  eeg::Recording rec(spec.fs, channels, std::move(data));
  eeg::AlignOptions align;
  align.offset_s = spec.log_offset_s;
  rec = eeg::align_behavior(rec, log, align);
  return {std::move(rec), std::move(m)};
}

}  // namespace wcst::synth
