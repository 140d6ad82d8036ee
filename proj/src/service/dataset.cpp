#include "wcstlab/service/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "wcstlab/agents/closed_loop.hpp"
#include "wcstlab/agents/hypothesis.hpp"
#include "wcstlab/eeg/brainvision.hpp"
#include "wcstlab/errors.hpp"
#include "wcstlab/random.hpp"
#include "wcstlab/service/pipeline_config.hpp"
#include "wcstlab/synth/synth.hpp"

namespace wcst::service {

namespace fs = std::filesystem;

namespace {

constexpr double kLeadIn = 2.0;  // recording seconds before the log's t = 0
constexpr double kTail = 2.0;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  out << text;
}

}  // namespace

DatasetResult write_dataset(const DatasetSpec& spec, const std::string& out_dir) {
  if (spec.n_participants < 2) throw ConfigError("a dataset needs at least 2 participants");
  fs::create_directories(out_dir);
  DatasetResult result;
  PipelineConfig cfg;

  for (int i = 0; i < spec.n_participants; ++i) {
    const auto id = fmt::format("p{:02d}", i + 1);
    const auto stream = static_cast<std::uint64_t>(i);

    task::SessionConfig sc;
    sc.seed = mix_seed(spec.seed, stream);
    sc.n_blocks = spec.n_blocks;
    task::Session session(sc, id);
    agents::TryOrder order = agents::kDefaultTryOrder;
    std::rotate(order.begin(), order.begin() + (i % 4), order.end());
    agents::HypothesisAgent agent(order, spec.lapse_rate, mix_seed(spec.seed, 100 + stream));
    agents::run_closed_loop(session, agent);
    const auto log = session.to_log();

    const double end = log.records().empty() ? 0.0 : log.records().back().times.feedback_on + sc.feedback_duration;
    auto ss = synth::default_spec(mix_seed(spec.seed, 200 + stream), kLeadIn + end + kTail, spec.fs);
    ss.log_offset_s = kLeadIn;
    if (spec.line_noise_uv > 0.0) {
      synth::ComponentSpec line;
      line.kind = synth::ComponentKind::LineNoise;
      line.amplitude = spec.line_noise_uv;
      ss.components.push_back(line);
    }
    if (spec.search_effect) {
      synth::ComponentSpec fx;
      fx.kind = synth::ComponentKind::ErpP300;
      fx.lock = synth::EventLock::Stimulus;
      fx.amplitude = spec.effect_uv;
      fx.latency_s = spec.effect_latency_s;
      fx.width_s = spec.effect_width_s;
      fx.channels = spec.effect_channels;
      fx.condition_gain = {{"SEARCH", 1.0}};
      ss.components.push_back(fx);
    }
    const auto generated = synth::generate(ss, log);

    const auto base = fs::path(out_dir) / id;
    eeg::write_brainvision_file(generated.recording, base.string() + ".vhdr");
    log.write_file(base.string() + ".jsonl");
    write_text(base.string() + ".manifest.json", generated.manifest.to_json().dump(1) + "\n");

    cfg.participants.push_back({id, id + ".vhdr", id + ".jsonl"});
    result.participant_ids.push_back(id);
  }

  cfg.log_offset_s = kLeadIn;
  cfg.ica.fit_decimation = spec.ica_fit_decimation;
  cfg.cluster.n_permutations = spec.n_permutations;
  cfg.validate();
  cfg.validate_for_rate(spec.fs);
  result.config_path = (fs::path(out_dir) / "pipeline.json").string();
  write_text(result.config_path, cfg.to_json().dump(2) + "\n");
  return result;
}

}  // namespace wcst::service
