#pragma once

#include <array>
#include <string_view>

#include "wcstlab/eeg/recording.hpp"
#include "wcstlab/task/trial_log.hpp"

namespace wcst::eeg::labels {
inline constexpr std::string_view kStimulus = "STIM";
inline constexpr std::string_view kFeedbackCorrect = "FB_COR";
inline constexpr std::string_view kFeedbackIncorrect = "FB_INC";
inline constexpr std::string_view kConfirm = "COND_CONF";
inline constexpr std::string_view kSearch = "COND_SEARCH";
inline constexpr std::array<std::string_view, 5> kAll{kStimulus, kFeedbackCorrect, kFeedbackIncorrect, kConfirm,
                                                      kSearch};
}  // namespace wcst::eeg::labels

namespace wcst::eeg {

struct AlignOptions {
  double offset_s = 0.0;  // recording time of the log's t = 0
};

std::int64_t nearest_sample(double t_seconds, double fs);

// Replaces any existing semantic markers with ones derived from the log:
// STIM and COND_CONF/COND_SEARCH at stimulus onset, FB_COR/FB_INC at
// feedback onset. Timeouts count as incorrect feedback.
Recording align_behavior(const Recording& rec, const task::TrialLog& log, const AlignOptions& options = {});

}  // namespace wcst::eeg
