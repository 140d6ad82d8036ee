#include "wcstlab/eeg/recording.hpp"

#include <set>

#include <fmt/format.h>

#include "wcstlab/errors.hpp"

namespace wcst::eeg {

Recording::Recording(double fs, std::vector<ChannelInfo> channels, Matrix data, std::vector<Marker> markers)
    : fs_(fs), channels_(std::move(channels)), data_(std::move(data)), markers_(std::move(markers)) {
  if (!(fs_ > 0.0)) throw InputError(fmt::format("sampling rate must be > 0 (got {})", fs_));
  if (static_cast<std::size_t>(data_.rows()) != channels_.size()) {
    throw InputError(fmt::format("data has {} rows but {} channels are declared", data_.rows(), channels_.size()));
  }
  std::set<std::string> names;
  for (const auto& c : channels_) {
    if (!names.insert(c.name).second) throw InputError("duplicate channel name: " + c.name);
  }
  for (const auto& m : markers_) {
    if (m.sample < 0 || m.sample >= data_.cols()) {
      throw InputError(fmt::format("marker '{}' at sample {} outside [0, {})", m.label, m.sample, data_.cols()));
    }
  }
}

std::optional<std::size_t> Recording::channel_index(std::string_view name) const {
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    if (channels_[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::size_t> Recording::indices(ChannelRole role) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    if (channels_[i].role == role) out.push_back(i);
  }
  return out;
}

std::vector<std::string> Recording::channel_names() const {
  std::vector<std::string> out;
  out.reserve(channels_.size());
  for (const auto& c : channels_) out.push_back(c.name);
  return out;
}

Recording Recording::with_data(Matrix data) const { return Recording(fs_, channels_, std::move(data), markers_); }

Recording Recording::with_markers(std::vector<Marker> markers) const {
  return Recording(fs_, channels_, data_, std::move(markers));
}

}  // namespace wcst::eeg
