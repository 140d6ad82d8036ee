#pragma once

#include <complex>
#include <span>
#include <vector>

#include "wcstlab/eeg/recording.hpp"

namespace wcst::signal {

// Second-order section, a0 normalised to 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

struct SosFilter {
  std::vector<Biquad> sections;
  double fs = 1.0;
  // Slowest pole decay time in samples.
  double time_constant() const;
};

// Digital Butterworth band-pass from an order-`order` analog prototype
// (bilinear transform with prewarping), unity gain at the geometric centre.
SosFilter design_butterworth_bandpass(int order, double lo, double hi, double fs);

std::complex<double> frequency_response(const SosFilter& filter, double freq);

// Causal single pass, zero initial state.
std::vector<double> sosfilt(const SosFilter& filter, std::span<const double> x);

// Forward-backward pass with odd reflection padding of three time constants
// and steady-state initial conditions. Zero phase, squared magnitude.
std::vector<double> filtfilt(const SosFilter& filter, std::span<const double> x);

// Zero-phase order-4 Butterworth band-pass on every channel.
eeg::Recording bandpass(const eeg::Recording& rec, double lo, double hi, int order = 4);

}  // namespace wcst::signal
