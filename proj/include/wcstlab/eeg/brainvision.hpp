#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wcstlab/eeg/montage.hpp"
#include "wcstlab/eeg/recording.hpp"

namespace wcst::eeg {

// Header (.vhdr), marker (.vmrk) and binary (.eeg) documents of the
// IEEE_FLOAT_32 / MULTIPLEXED BrainVision dialect.
struct BrainVisionFiles {
  std::string header;
  std::string markers;
  std::vector<std::uint8_t> payload;
};

struct BrainVisionReadOptions {
  std::vector<std::string> eog_labels = kDefaultEogLabels;
  // Names used in error messages.
  std::string header_name = "<vhdr>";
  std::string marker_name = "<vmrk>";
  std::string data_name = "<eeg>";
};

// Throws ParseError naming file, section and line.
Recording read_brainvision(std::string_view header, std::string_view markers,
                           std::span<const std::uint8_t> payload, const BrainVisionReadOptions& options = {});

// `basename` is used for the DataFile/MarkerFile references.
BrainVisionFiles write_brainvision(const Recording& rec, std::string_view basename);

// File helpers; `vhdr_path` names the header, the other two files are
// resolved from it.
Recording read_brainvision_file(const std::string& vhdr_path, std::vector<std::string> eog_labels = kDefaultEogLabels);
void write_brainvision_file(const Recording& rec, const std::string& vhdr_path);

}  // namespace wcst::eeg
