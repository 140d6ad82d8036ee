#pragma once

#include <span>
#include <vector>

#include "wcstlab/eeg/recording.hpp"

namespace wcst::erp {

// Undirected channel neighbourhood graph without self-loops.
class Adjacency {
 public:
  Adjacency() = default;
  explicit Adjacency(std::size_t n) : neighbours_(n) {}

  void connect(std::size_t a, std::size_t b);
  bool connected(std::size_t a, std::size_t b) const;
  std::size_t size() const { return neighbours_.size(); }
  std::size_t n_edges() const;
  const std::vector<std::size_t>& neighbours(std::size_t i) const { return neighbours_[i]; }

 private:
  std::vector<std::vector<std::size_t>> neighbours_;
};

// Edge iff the unit-sphere chord between two electrodes, divided by the
// sphere diameter, is below `threshold`. Throws InputError for a channel
// without a position.
Adjacency build_adjacency(std::span<const eeg::ChannelInfo> channels, double threshold = 0.4);

}  // namespace wcst::erp
