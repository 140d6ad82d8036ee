#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "wcstlab/eeg/montage.hpp"
#include "wcstlab/eeg/recording.hpp"

namespace testutil {

inline std::vector<double> sine(std::size_t n, double fs, double freq, double amp = 1.0, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2 * std::numbers::pi * freq * i / fs + phase);
  return x;
}

inline double rms(const double* x, std::size_t n) {
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return std::sqrt(s / n);
}

inline double rms(const std::vector<double>& x, std::size_t from = 0, std::size_t to = 0) {
  if (to == 0) to = x.size();
  return rms(x.data() + from, to - from);
}

// Recording whose channel names come from the standard montage in order.
inline wcst::eeg::Recording make_recording(double fs, const std::vector<std::vector<double>>& rows,
                                           const std::vector<std::string>& eog = {}) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < rows.size(); ++c) names.emplace_back(wcst::eeg::standard_montage()[c].name);
  wcst::eeg::Matrix data(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t c = 0; c < rows.size(); ++c) {
    for (std::size_t i = 0; i < rows[c].size(); ++i) data(c, i) = rows[c][i];
  }
  return {fs, wcst::eeg::make_channels(names, eog), data};
}

inline std::vector<double> row(const wcst::eeg::Recording& rec, Eigen::Index c) {
  std::vector<double> out(rec.n_samples());
  for (Eigen::Index i = 0; i < rec.n_samples(); ++i) out[i] = rec.data()(c, i);
  return out;
}

}  // namespace testutil
