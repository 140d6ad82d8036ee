#include "wcstlab/eeg/align.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "wcstlab/errors.hpp"
#include "wcstlab/metrics/metrics.hpp"

namespace wcst::eeg {

std::int64_t nearest_sample(double t_seconds, double fs) {
  return static_cast<std::int64_t>(std::llround(t_seconds * fs));
}

Recording align_behavior(const Recording& rec, const task::TrialLog& log, const AlignOptions& options) {
  std::vector<Marker> markers;
  for (const auto& m : rec.markers()) {
    if (std::find(labels::kAll.begin(), labels::kAll.end(), m.label) == labels::kAll.end()) markers.push_back(m);
  }

  const auto phases = metrics::classify_phases(log);
  const auto n = rec.n_samples();
  std::vector<int> offending;
  std::vector<Marker> added;
  const auto& records = log.records();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const auto stim = nearest_sample(r.times.stimulus_on + options.offset_s, rec.fs());
    const auto fb = nearest_sample(r.times.feedback_on + options.offset_s, rec.fs());
    if (stim < 0 || stim >= n || fb < 0 || fb >= n) {
      offending.push_back(r.spec.trial_index);
      continue;
    }
    added.push_back({stim, std::string(labels::kStimulus)});
    added.push_back({stim, std::string(phases[i] == metrics::TrialPhase::Search ? labels::kSearch : labels::kConfirm)});
    added.push_back({fb, std::string(r.correct ? labels::kFeedbackCorrect : labels::kFeedbackIncorrect)});
  }
  if (!offending.empty()) {
    std::string list;
    for (std::size_t i = 0; i < offending.size() && i < 20; ++i) list += (i ? "," : "") + std::to_string(offending[i]);
    throw AlignmentError(fmt::format("{} trial event(s) fall outside the {:.3f} s recording (trials {}{})",
                                     offending.size(), rec.duration(), list, offending.size() > 20 ? ",..." : ""),
                         offending);
  }
  markers.insert(markers.end(), added.begin(), added.end());
  std::stable_sort(markers.begin(), markers.end(), [](const Marker& a, const Marker& b) { return a.sample < b.sample; });
  return rec.with_markers(std::move(markers));
}

}  // namespace wcst::eeg
