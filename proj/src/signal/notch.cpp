#include "wcstlab/signal/notch.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/QR>
#include <fmt/format.h>

#include "wcstlab/errors.hpp"

namespace wcst::signal {

namespace {

// Cosine/sine columns per harmonic over a window of `len` samples.
Eigen::MatrixXd harmonic_design(Eigen::Index len, double fs, const std::vector<double>& freqs) {
  Eigen::MatrixXd x(len, static_cast<Eigen::Index>(2 * freqs.size()));
  for (Eigen::Index i = 0; i < len; ++i) {
    const double t = static_cast<double>(i) / fs;
    for (std::size_t k = 0; k < freqs.size(); ++k) {
      const double ph = 2.0 * std::numbers::pi * freqs[k] * t;
      x(i, static_cast<Eigen::Index>(2 * k)) = std::cos(ph);
      x(i, static_cast<Eigen::Index>(2 * k + 1)) = std::sin(ph);
    }
  }
  return x;
}

}  // namespace

eeg::Recording notch_spectrum_fit(const eeg::Recording& rec, const NotchOptions& options) {
  const double fs = rec.fs();
  const double nyquist = fs / 2.0;
  if (!(options.line_freq > 0.0) || options.line_freq >= nyquist) {
    throw InputError(fmt::format("line frequency {} Hz must lie in (0, fs/2 = {})", options.line_freq, nyquist));
  }
  if (!(options.overlap >= 0.0 && options.overlap < 1.0)) {
    throw InputError(fmt::format("notch overlap must be in [0, 1) (got {})", options.overlap));
  }
  const double max_freq = std::min(options.max_freq.value_or(nyquist), nyquist);
  std::vector<double> freqs;
  for (double f = options.line_freq; f < max_freq - 1e-9; f += options.line_freq) freqs.push_back(f);

  const Eigen::Index n = rec.n_samples();
  if (n == 0) return rec;
  Eigen::Index win = std::min<Eigen::Index>(std::llround(options.window_s * fs), n);
  if (static_cast<double>(win) < 2.0 * fs / options.line_freq) {
    throw InputError(fmt::format("notch window of {} samples is shorter than two line periods", win));
  }
  const Eigen::Index hop = std::max<Eigen::Index>(1, std::llround(static_cast<double>(win) * (1.0 - options.overlap)));

  std::vector<Eigen::Index> starts;
  for (Eigen::Index s = 0; s + win < n; s += hop) starts.push_back(s);
  if (starts.empty() || starts.back() != n - win) starts.push_back(n - win);

  const Eigen::MatrixXd design = harmonic_design(win, fs, freqs);
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  Eigen::VectorXd taper(win);
  for (Eigen::Index i = 0; i < win; ++i) {
    taper(i) = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(win)));
  }

  const Eigen::Index n_ch = rec.n_channels();
  eeg::Matrix fitted = eeg::Matrix::Zero(n_ch, n);
  Eigen::RowVectorXd weight = Eigen::RowVectorXd::Zero(n);
  for (const auto s : starts) {
    // window samples x channels
    const Eigen::MatrixXd y = rec.data().middleCols(s, win).transpose();
    const Eigen::MatrixXd fit = design * qr.solve(y);
    fitted.middleCols(s, win) += (fit.array().colwise() * taper.array()).matrix().transpose();
    weight.segment(s, win) += taper.transpose();
  }
  eeg::Matrix out = rec.data();
  for (Eigen::Index c = 0; c < n_ch; ++c) {
    out.row(c).array() -= fitted.row(c).array() / weight.array();
  }
  return rec.with_data(std::move(out));
}

}  // namespace wcst::signal
