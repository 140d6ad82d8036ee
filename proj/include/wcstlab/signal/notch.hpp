#pragma once

#include <optional>

#include "wcstlab/eeg/recording.hpp"

namespace wcst::signal {

struct NotchOptions {
  double line_freq = 60.0;
  std::optional<double> max_freq;  // highest harmonic fitted; default fs/2
  double window_s = 4.0;
  double overlap = 0.5;  // fraction of the window shared by neighbours
};

// Line-noise removal by sinusoid regression: in each tapered window every
// harmonic's sine/cosine pair is least-squares fitted and subtracted; window
// estimates are blended by overlap-add with a raised-cosine taper.
eeg::Recording notch_spectrum_fit(const eeg::Recording& rec, const NotchOptions& options = {});

}  // namespace wcst::signal
