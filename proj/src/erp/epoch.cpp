#include "wcstlab/erp/epoch.hpp"

#include <cmath>

#include <fmt/format.h>

#include "wcstlab/eeg/align.hpp"
#include "wcstlab/errors.hpp"

namespace wcst::erp {

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::Conf: return "CONF";
    case Condition::Search: return "SEARCH";
    case Condition::Cor: return "COR";
    case Condition::Inc: return "INC";
  }
  return "?";
}

Condition condition_from_string(std::string_view name) {
  for (auto c : {Condition::Conf, Condition::Search, Condition::Cor, Condition::Inc}) {
    if (name == to_string(c)) return c;
  }
  throw InputError(fmt::format("unknown condition '{}' (expected CONF, SEARCH, COR or INC)", name));
}

std::string_view to_string(Lock lock) { return lock == Lock::Stimulus ? "stimulus" : "feedback"; }

Lock lock_from_string(std::string_view name) {
  if (name == "stimulus") return Lock::Stimulus;
  if (name == "feedback") return Lock::Feedback;
  throw InputError(fmt::format("unknown epoch lock '{}' (expected stimulus or feedback)", name));
}

TimeAxis make_time_axis(double fs, const EpochWindow& window) {
  if (!(window.tmin < 0.0 && window.tmax > 0.0)) {
    throw InputError(fmt::format("epoch window [{}, {}) must straddle the event", window.tmin, window.tmax));
  }
  TimeAxis axis;
  axis.fs = fs;
  axis.offset = std::llround(window.tmin * fs);
  axis.n_samples = std::llround((window.tmax - window.tmin) * fs);
  return axis;
}

std::vector<const Epoch*> EpochSet::of(Condition c) const {
  std::vector<const Epoch*> out;
  for (const auto& e : epochs) {
    if (e.condition == c) out.push_back(&e);
  }
  return out;
}

EpochSet epoch(const eeg::Recording& rec, Lock lock, std::string participant, const EpochWindow& window) {
  EpochSet set;
  set.axis = make_time_axis(rec.fs(), window);
  const auto eeg_idx = rec.indices(eeg::ChannelRole::EEG);
  for (auto i : eeg_idx) set.channel_names.push_back(rec.channels()[i].name);

  const auto pre = -set.axis.offset;
  for (const auto& m : rec.markers()) {
    std::optional<Condition> cond;
    if (lock == Lock::Stimulus) {
      if (m.label == eeg::labels::kConfirm) cond = Condition::Conf;
      if (m.label == eeg::labels::kSearch) cond = Condition::Search;
    } else {
      if (m.label == eeg::labels::kFeedbackCorrect) cond = Condition::Cor;
      if (m.label == eeg::labels::kFeedbackIncorrect) cond = Condition::Inc;
    }
    if (!cond) continue;
    const auto start = m.sample + set.axis.offset;
    if (start < 0 || start + set.axis.n_samples > rec.n_samples()) {
      ++set.skipped;
      continue;
    }
    Epoch e;
    e.condition = *cond;
    e.event_sample = m.sample;
    e.participant = participant;
    e.data.resize(static_cast<Eigen::Index>(eeg_idx.size()), set.axis.n_samples);
    for (std::size_t c = 0; c < eeg_idx.size(); ++c) {
      e.data.row(static_cast<Eigen::Index>(c)) =
          rec.data().row(static_cast<Eigen::Index>(eeg_idx[c])).segment(start, set.axis.n_samples);
    }
    if (pre > 0) {
      const Eigen::VectorXd base = e.data.leftCols(pre).rowwise().mean();
      e.data.colwise() -= base;
    }
    set.epochs.push_back(std::move(e));
  }
  if (set.epochs.empty()) {
    throw EmptyInputError(fmt::format("no {}-locked epochs{} ({} skipped near the recording edges)", to_string(lock),
                                      participant.empty() ? "" : " for " + participant, set.skipped));
  }
  return set;
}

}  // namespace wcst::erp
