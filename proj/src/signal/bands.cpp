#include "wcstlab/signal/bands.hpp"

#include <array>

#include "wcstlab/signal/butterworth.hpp"

namespace wcst::signal {

std::span<const BandDef> canonical_bands() {
  static const std::array<BandDef, 5> table{{
      {"delta", 0.5, 4.0},
      {"theta", 4.0, 8.0},
      {"alpha", 8.0, 13.0},
      {"beta", 13.0, 30.0},
      {"gamma", 30.0, 80.0},
  }};
  return table;
}

std::vector<std::pair<std::string, eeg::Recording>> band_split(const eeg::Recording& rec,
                                                               std::span<const BandDef> bands) {
  std::vector<std::pair<std::string, eeg::Recording>> out;
  out.reserve(bands.size());
  for (const auto& band : bands) out.emplace_back(band.name, bandpass(rec, band.lo, band.hi));
  return out;
}

}  // namespace wcst::signal
