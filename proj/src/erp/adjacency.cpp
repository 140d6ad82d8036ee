#include "wcstlab/erp/adjacency.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "wcstlab/errors.hpp"

namespace wcst::erp {

void Adjacency::connect(std::size_t a, std::size_t b) {
  if (a == b || connected(a, b)) return;
  neighbours_[a].push_back(b);
  neighbours_[b].push_back(a);
  std::sort(neighbours_[a].begin(), neighbours_[a].end());
  std::sort(neighbours_[b].begin(), neighbours_[b].end());
}

bool Adjacency::connected(std::size_t a, std::size_t b) const {
  return std::binary_search(neighbours_[a].begin(), neighbours_[a].end(), b);
}

std::size_t Adjacency::n_edges() const {
  std::size_t n = 0;
  for (const auto& v : neighbours_) n += v.size();
  return n / 2;
}

Adjacency build_adjacency(std::span<const eeg::ChannelInfo> channels, double threshold) {
  for (const auto& ch : channels) {
    if (!ch.position) throw InputError(fmt::format("channel '{}' has no position", ch.name));
  }
  Adjacency adj(channels.size());
  for (std::size_t i = 0; i < channels.size(); ++i) {
    for (std::size_t j = i + 1; j < channels.size(); ++j) {
      const auto& p = *channels[i].position;
      const auto& q = *channels[j].position;
      const double chord = std::sqrt((p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y) + (p.z - q.z) * (p.z - q.z));
      if (chord / 2.0 < threshold) adj.connect(i, j);
    }
  }
  return adj;
}

}  // namespace wcst::erp
