#include "wcstlab/erp/average.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "wcstlab/errors.hpp"
#include "wcstlab/random.hpp"

namespace wcst::erp {

namespace {

ConditionAverage mean_of(Condition c, const std::vector<const Epoch*>& picks, const TimeAxis& axis,
                         Eigen::Index channels) {
  ConditionAverage avg;
  avg.condition = c;
  avg.n_trials = static_cast<int>(picks.size());
  avg.mean = Eigen::MatrixXd::Zero(channels, axis.n_samples);
  for (const auto* e : picks) avg.mean += e->data;
  avg.mean /= static_cast<double>(picks.size());
  return avg;
}

}  // namespace

std::pair<ConditionAverage, ConditionAverage> balance_and_average(const EpochSet& epochs, Condition a, Condition b,
                                                                  std::uint64_t seed) {
  auto ea = epochs.of(a);
  auto eb = epochs.of(b);
  if (ea.empty() || eb.empty()) {
    throw InputError(fmt::format("cannot balance {} ({} epochs) against {} ({} epochs)", to_string(a), ea.size(),
                                 to_string(b), eb.size()));
  }
  const std::size_t k = std::min(ea.size(), eb.size());
  Rng rng(seed);
  auto subsample = [&](std::vector<const Epoch*>& v) {
    if (v.size() == k) return;
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    // Partial Fisher-Yates: the first k positions are a uniform sample.
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + static_cast<std::size_t>(uniform_index(rng, static_cast<int>(idx.size() - i)));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    std::vector<const Epoch*> picked;
    for (auto i : idx) picked.push_back(v[i]);
    v = std::move(picked);
  };
  subsample(ea);
  subsample(eb);
  const auto channels = static_cast<Eigen::Index>(epochs.channel_names.size());
  return {mean_of(a, ea, epochs.axis, channels), mean_of(b, eb, epochs.axis, channels)};
}

Eigen::MatrixXd difference_wave(const ConditionAverage& a, const ConditionAverage& b) {
  if (a.mean.rows() != b.mean.rows() || a.mean.cols() != b.mean.cols()) {
    throw InputError(fmt::format("difference wave shape mismatch: {}x{} vs {}x{}", a.mean.rows(), a.mean.cols(),
                                 b.mean.rows(), b.mean.cols()));
  }
  return a.mean - b.mean;
}

}  // namespace wcst::erp
