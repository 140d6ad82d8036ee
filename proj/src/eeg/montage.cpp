#include "wcstlab/eeg/montage.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace wcst::eeg {

namespace {

constexpr std::array<MontageEntry, 32> kActiCap32{{
    {"Fp1", -90, -72}, {"Fz", 45, 90},    {"F3", -60, -51},  {"F7", -90, -36},  {"FT9", -113, -18},
    {"FC5", -69, -21}, {"FC1", -31, -46}, {"C3", -45, 0},    {"T7", -90, 0},    {"TP9", -113, 18},
    {"CP5", -69, 21},  {"CP1", -31, 46},  {"Pz", 45, -90},   {"P3", -60, 51},   {"P7", -90, 36},
    {"O1", -90, 72},   {"Oz", 90, -90},   {"O2", 90, -72},   {"P4", 60, -51},   {"P8", 90, -36},
    {"TP10", 113, -18}, {"CP6", 69, -21}, {"CP2", 31, -46},  {"Cz", 0, 0},      {"C4", 45, 0},
    {"T8", 90, 0},     {"FT10", 113, 18}, {"FC6", 69, 21},   {"FC2", 31, 46},   {"F4", 60, 51},
    {"F8", 90, 36},    {"Fp2", 90, 72},
}};

}  // namespace

std::span<const MontageEntry> standard_montage() { return kActiCap32; }

Position spherical_to_position(double theta_deg, double phi_deg) {
  const double th = theta_deg * std::numbers::pi / 180.0;
  const double ph = phi_deg * std::numbers::pi / 180.0;
  return {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
}

std::optional<Position> standard_position(std::string_view name) {
  for (const auto& e : kActiCap32) {
    if (e.name == name) return spherical_to_position(e.theta, e.phi);
  }
  return std::nullopt;
}

std::vector<ChannelInfo> make_channels(std::span<const std::string> names, std::span<const std::string> eog) {
  std::vector<ChannelInfo> out;
  out.reserve(names.size());
  for (const auto& n : names) {
    ChannelInfo c;
    c.name = n;
    c.position = standard_position(n);
    out.push_back(std::move(c));
  }
  return assign_roles(std::move(out), eog);
}

std::vector<ChannelInfo> default_channels(std::span<const std::string> eog) {
  std::vector<std::string> names;
  for (const auto& e : kActiCap32) names.emplace_back(e.name);
  return make_channels(names, eog);
}

std::vector<ChannelInfo> assign_roles(std::vector<ChannelInfo> channels, std::span<const std::string> eog) {
  for (auto& c : channels) {
    c.role = std::find(eog.begin(), eog.end(), c.name) != eog.end() ? ChannelRole::EOG : ChannelRole::EEG;
  }
  return channels;
}

}  // namespace wcst::eeg
