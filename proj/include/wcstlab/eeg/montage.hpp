#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wcstlab/eeg/recording.hpp"

namespace wcst::eeg {

// Spherical electrode angles in degrees (BrainVision/BESA convention):
// x = sin(theta) cos(phi), y = sin(theta) sin(phi), z = cos(theta).
struct MontageEntry {
  std::string_view name;
  double theta;
  double phi;
};

// 32-channel actiCAP layout in recording order.
std::span<const MontageEntry> standard_montage();

Position spherical_to_position(double theta_deg, double phi_deg);
std::optional<Position> standard_position(std::string_view name);

inline const std::vector<std::string> kDefaultEogLabels{"TP9", "TP10"};

// Channels named after the montage; labels in `eog` get role EOG.
std::vector<ChannelInfo> make_channels(std::span<const std::string> names,
                                       std::span<const std::string> eog = kDefaultEogLabels);
std::vector<ChannelInfo> default_channels(std::span<const std::string> eog = kDefaultEogLabels);

// Re-assigns roles: exactly the labels in `eog` become EOG.
std::vector<ChannelInfo> assign_roles(std::vector<ChannelInfo> channels, std::span<const std::string> eog);

}  // namespace wcst::eeg
