#include "wcstlab/signal/butterworth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "wcstlab/errors.hpp"

namespace wcst::signal {

namespace {

using cd = std::complex<double>;

cd section_response(const Biquad& s, cd z1) {  // z1 = z^-1
  return (s.b0 + s.b1 * z1 + s.b2 * z1 * z1) / (1.0 + s.a1 * z1 + s.a2 * z1 * z1);
}

// Steady-state DF2T state of one section for a unit step input.
std::array<double, 2> step_state(const Biquad& s) {
  const double y = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
  const double z2 = s.b2 - s.a2 * y;
  const double z1 = s.b1 - s.a1 * y + z2;
  return {z1, z2};
}

void run_sections(const SosFilter& f, std::vector<double>& x, const std::vector<std::array<double, 2>>* zi,
                  double zi_scale) {
  for (std::size_t k = 0; k < f.sections.size(); ++k) {
    const auto& s = f.sections[k];
    double z1 = zi ? (*zi)[k][0] * zi_scale : 0.0;
    double z2 = zi ? (*zi)[k][1] * zi_scale : 0.0;
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
}

}  // namespace

double SosFilter::time_constant() const {
  double slowest = 0.0;
  for (const auto& s : sections) {
    const cd disc = std::sqrt(cd(s.a1 * s.a1 - 4.0 * s.a2, 0.0));
    for (const cd p : {(-s.a1 + disc) / 2.0, (-s.a1 - disc) / 2.0}) {
      const double r = std::abs(p);
      if (r > 0.0 && r < 1.0) slowest = std::max(slowest, -1.0 / std::log(r));
    }
  }
  return slowest;
}

SosFilter design_butterworth_bandpass(int order, double lo, double hi, double fs) {
  if (order < 1) throw InputError(fmt::format("filter order must be >= 1 (got {})", order));
  if (!(lo > 0.0 && lo < hi && hi < fs / 2.0)) {
    throw InputError(fmt::format("invalid band {}-{} Hz at fs {} (need 0 < lo < hi < fs/2)", lo, hi, fs));
  }
  const double pi = std::numbers::pi;
  const double w1 = 2.0 * fs * std::tan(pi * lo / fs);
  const double w2 = 2.0 * fs * std::tan(pi * hi / fs);
  const double bw = w2 - w1;
  const double w0 = std::sqrt(w1 * w2);

  std::vector<cd> poles;
  for (int k = 0; k < order; ++k) {
    const cd p = std::polar(1.0, pi * (2.0 * k + order + 1.0) / (2.0 * order));
    const cd a = p * bw / 2.0;
    const cd d = std::sqrt(a * a - w0 * w0);
    for (const cd s : {a + d, a - d}) poles.push_back((2.0 * fs + s) / (2.0 * fs - s));
  }

  constexpr double eps = 1e-12;
  std::vector<std::pair<cd, cd>> pairs;
  std::vector<double> reals;
  for (const auto& p : poles) {
    if (p.imag() > eps) {
      pairs.emplace_back(p, std::conj(p));
    } else if (std::abs(p.imag()) <= eps) {
      reals.push_back(p.real());
    }
  }
  std::sort(reals.begin(), reals.end());
  for (std::size_t i = 0; i + 1 < reals.size(); i += 2) pairs.emplace_back(reals[i], reals[i + 1]);

  SosFilter f;
  f.fs = fs;
  const double wc = 2.0 * std::atan(w0 / (2.0 * fs));
  const cd zc1 = std::polar(1.0, -wc);
  for (const auto& [p1, p2] : pairs) {
    Biquad s;
    s.b0 = 1.0;
    s.b1 = 0.0;
    s.b2 = -1.0;
    s.a1 = -(p1 + p2).real();
    s.a2 = (p1 * p2).real();
    const double g = 1.0 / std::abs(section_response(s, zc1));
    s.b0 *= g;
    s.b2 *= g;
    f.sections.push_back(s);
  }
  return f;
}

std::complex<double> frequency_response(const SosFilter& filter, double freq) {
  const cd z1 = std::polar(1.0, -2.0 * std::numbers::pi * freq / filter.fs);
  cd h = 1.0;
  for (const auto& s : filter.sections) h *= section_response(s, z1);
  return h;
}

std::vector<double> sosfilt(const SosFilter& filter, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  run_sections(filter, y, nullptr, 0.0);
  return y;
}

std::vector<double> filtfilt(const SosFilter& filter, std::span<const double> x) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  if (n == 0) return {};
  const auto pad = std::min<std::ptrdiff_t>(n - 1, static_cast<std::ptrdiff_t>(std::ceil(3.0 * filter.time_constant())));

  std::vector<double> ext;
  ext.reserve(static_cast<std::size_t>(n + 2 * pad));
  for (std::ptrdiff_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::ptrdiff_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  // Steady-state initial conditions, chained through the cascade gains.
  std::vector<std::array<double, 2>> zi;
  double gain = 1.0;
  for (const auto& s : filter.sections) {
    auto st = step_state(s);
    zi.push_back({st[0] * gain, st[1] * gain});
    gain *= (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
  }

  run_sections(filter, ext, &zi, ext.front());
  std::reverse(ext.begin(), ext.end());
  run_sections(filter, ext, &zi, ext.front());
  std::reverse(ext.begin(), ext.end());
  return std::vector<double>(ext.begin() + pad, ext.begin() + pad + n);
}

eeg::Recording bandpass(const eeg::Recording& rec, double lo, double hi, int order) {
  const auto filter = design_butterworth_bandpass(order, lo, hi, rec.fs());
  eeg::Matrix out(rec.n_channels(), rec.n_samples());
  for (Eigen::Index c = 0; c < rec.n_channels(); ++c) {
    const auto row = filtfilt(filter, std::span(rec.data().row(c).data(), static_cast<std::size_t>(rec.n_samples())));
    out.row(c) = Eigen::Map<const Eigen::RowVectorXd>(row.data(), static_cast<Eigen::Index>(row.size()));
  }
  return rec.with_data(std::move(out));
}

}  // namespace wcst::signal
