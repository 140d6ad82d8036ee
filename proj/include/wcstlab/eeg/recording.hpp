#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace wcst::eeg {

// channels x samples, one contiguous row per channel.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ChannelRole { EEG, EOG };

struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct ChannelInfo {
  std::string name;
  ChannelRole role = ChannelRole::EEG;
  std::optional<Position> position;  // unit sphere, +x right, +y nose, +z vertex
  double resolution = 1.0;           // microvolts per stored unit
  std::string unit = "\xC2\xB5V";
};

struct Marker {
  std::int64_t sample = 0;  // 0-based
  std::string label;
  std::string type = "Stimulus";

  friend bool operator==(const Marker&, const Marker&) = default;
};

// Multichannel recording in microvolts. Immutable once built; transforms
// return new recordings.
class Recording {
 public:
  Recording() = default;
  // Throws InputError if the invariants (row count, unique names, fs > 0,
  // marker range) do not hold.
  Recording(double fs, std::vector<ChannelInfo> channels, Matrix data, std::vector<Marker> markers = {});

  double fs() const { return fs_; }
  const std::vector<ChannelInfo>& channels() const { return channels_; }
  const Matrix& data() const { return data_; }
  const std::vector<Marker>& markers() const { return markers_; }
  Eigen::Index n_channels() const { return data_.rows(); }
  Eigen::Index n_samples() const { return data_.cols(); }
  double duration() const { return static_cast<double>(n_samples()) / fs_; }

  std::optional<std::size_t> channel_index(std::string_view name) const;
  std::vector<std::size_t> indices(ChannelRole role) const;
  std::vector<std::string> channel_names() const;

  Recording with_data(Matrix data) const;
  Recording with_markers(std::vector<Marker> markers) const;

 private:
  double fs_ = 1000.0;
  std::vector<ChannelInfo> channels_;
  Matrix data_;
  std::vector<Marker> markers_;
};

}  // namespace wcst::eeg
