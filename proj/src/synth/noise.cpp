#include "wcstlab/synth/noise.hpp"

#include <cmath>
#include <complex>
#include <mutex>
#include <random>

#include <fftw3.h>

namespace wcst::synth {

namespace {

// FFTW planning is not thread-safe.
std::mutex plan_mutex;

// White Gaussian noise with bin k of its spectrum multiplied by gain(k).
template <typename Gain>
std::vector<double> shaped_noise(std::size_t n, Rng& rng, Gain gain) {
  std::vector<double> x(n, 0.0);
  std::normal_distribution<double> normal;
  for (auto& v : x) v = normal(rng);

  const std::size_t bins = n / 2 + 1;
  auto* spec = fftw_alloc_complex(bins);
  fftw_plan fwd, inv;
  {
    std::lock_guard lock(plan_mutex);
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), x.data(), spec, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec, x.data(), FFTW_ESTIMATE);
  }
  fftw_execute(fwd);
  for (std::size_t k = 0; k < bins; ++k) {
    const double g = gain(k);
    spec[k][0] *= g;
    spec[k][1] *= g;
  }
  fftw_execute(inv);
  {
    std::lock_guard lock(plan_mutex);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }
  fftw_free(spec);
  return x;
}

void standardize(std::vector<double>& x, double rms) {
  const std::size_t n = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double& v : x) {
    v -= mean;
    ss += v * v;
  }
  const double scale = ss > 0.0 ? rms / std::sqrt(ss / static_cast<double>(n)) : 0.0;
  for (double& v : x) v *= scale;
}

}  // namespace

std::vector<double> pink_noise(std::size_t n, double rms, Rng& rng) {
  if (n < 2) return std::vector<double>(n, 0.0);
  auto x = shaped_noise(n, rng, [](std::size_t k) { return k == 0 ? 0.0 : 1.0 / std::sqrt(static_cast<double>(k)); });
  standardize(x, rms);
  return x;
}

std::vector<double> slow_envelope(std::size_t n, double fs, double depth, Rng& rng, double cutoff_hz) {
  if (n < 2 || depth == 0.0) return std::vector<double>(n, 1.0);
  const double df = fs / static_cast<double>(n);
  auto u = shaped_noise(n, rng, [&](std::size_t k) { return k > 0 && static_cast<double>(k) * df < cutoff_hz ? 1.0 : 0.0; });
  standardize(u, 1.0);
  for (double& v : u) v = std::exp(depth * v);
  return u;
}

}  // namespace wcst::synth
