#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wcstlab/eeg/align.hpp"
#include "wcstlab/eeg/recording.hpp"
#include "wcstlab/task/trial_log.hpp"

namespace wcst::synth {

enum class ComponentKind { ErpFrn, ErpP300, BandBurst, Blink, LineNoise, PinkNoise };

std::string_view to_string(ComponentKind kind);  // "erp_frn", ...
ComponentKind component_kind_from_string(std::string_view name);

enum class EventLock { Stimulus, Feedback };

struct ComponentSpec {
  ComponentKind kind = ComponentKind::PinkNoise;
  // Empty: every channel for noise kinds, every EEG channel for event kinds.
  // Blinks ignore this and use the fixed ocular weight table.
  std::vector<std::string> channels;
  // Peak for ERPs, bursts and blinks; RMS for pink noise; per-harmonic peak
  // for line noise.
  double amplitude = 0.0;
  EventLock lock = EventLock::Feedback;
  // Gain per condition (CONF/SEARCH for stimulus lock, COR/INC for feedback
  // lock). Empty means gain 1 everywhere; a condition missing from a
  // non-empty map gets gain 0.
  std::map<std::string, double> condition_gain;
  std::optional<double> latency_s;  // defaults: FRN 0.2, P300 0.35, burst 0.3
  std::optional<double> width_s;    // defaults: FRN 0.05, P300 0.1, burst 0.1
  double frequency_hz = 10.0;       // band burst
  double interval_s = 3.0;          // mean blink spacing
  double line_freq = 60.0;
  int harmonics = 3;
  double white_fraction = 0.2;  // pink noise: white RMS relative to amplitude
  double modulation = 0.5;      // pink noise: depth of the slow log-amplitude envelope
};

struct SynthSpec {
  std::uint64_t seed = 0;
  double duration_s = 60.0;
  double fs = 1000.0;
  std::vector<std::string> channel_names;  // empty: the standard 32-channel montage
  std::vector<std::string> eog_labels{"TP9", "TP10"};
  double log_offset_s = 0.0;  // recording time of the log's t = 0
  std::vector<ComponentSpec> components;

  // Throws ConfigError.
  void validate() const;
};

// Default pink/white noise and blink artifacts plus an FRN on incorrect
// feedback and a P300 that is smaller after incorrect feedback.
SynthSpec default_spec(std::uint64_t seed, double duration_s, double fs = 1000.0);

// Stereotyped 0.4 s biphasic blink, peak 1.
double blink_template(double t_s);
// Spatial weight of the blink on a channel (0 for unlisted channels).
double blink_weight(std::string_view channel);

struct ManifestEntry {
  ComponentKind kind = ComponentKind::PinkNoise;
  std::vector<std::string> channels;
  std::vector<double> weights;  // one per channel
  std::int64_t start_sample = 0;
  std::int64_t end_sample = 0;     // exclusive
  std::int64_t event_sample = -1;  // anchor of event-locked components
  int trial = -1;
  std::string condition;
  double amplitude = 0.0;  // after the condition gain
  double latency_s = 0.0;
  double width_s = 0.0;
  double frequency_hz = 0.0;
  std::vector<double> phases;  // line noise, one per harmonic
  double white_fraction = 0.0;
  double modulation = 0.0;
  std::uint64_t seed = 0;  // pink noise stream

  bool stochastic() const { return kind == ComponentKind::PinkNoise; }
};

struct Manifest {
  double fs = 1000.0;
  std::int64_t n_samples = 0;
  std::vector<std::string> channel_names;
  std::vector<ManifestEntry> entries;

  nlohmann::ordered_json to_json() const;
  static Manifest from_json(const nlohmann::json& doc);
};

// Sample values of one deterministic entry over [start_sample, end_sample),
// before the channel weights.
std::vector<double> entry_waveform(const ManifestEntry& entry, double fs);

// Sum of every deterministic entry: the noise-free part of the recording.
eeg::Matrix render(const Manifest& manifest);

// Pink plus white noise of the stochastic entries.
eeg::Matrix render_noise(const Manifest& manifest);

struct SynthResult {
  eeg::Recording recording;  // with behaviour-aligned markers
  Manifest manifest;
};

SynthResult generate(const SynthSpec& spec, const task::TrialLog& log);

}  // namespace wcst::synth
