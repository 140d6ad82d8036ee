#pragma once

#include "wcstlab/eeg/recording.hpp"

namespace wcst::signal {

// Subtracts the instantaneous mean of the EEG-role channels from each EEG
// channel. EOG channels are copied unchanged. Needs >= 2 EEG channels.
eeg::Recording rereference_common_average(const eeg::Recording& rec);

}  // namespace wcst::signal
