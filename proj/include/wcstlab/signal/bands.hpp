#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wcstlab/eeg/recording.hpp"

namespace wcst::signal {

struct BandDef {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
};

// delta 0.5-4, theta 4-8, alpha 8-13, beta 13-30, gamma 30-80 Hz.
std::span<const BandDef> canonical_bands();

// One band-passed copy per band, in table order.
std::vector<std::pair<std::string, eeg::Recording>> band_split(const eeg::Recording& rec,
                                                               std::span<const BandDef> bands = canonical_bands());

}  // namespace wcst::signal
