#pragma once

#include <cstddef>
#include <vector>

#include "wcstlab/random.hpp"

namespace wcst::synth {

// Zero-mean Gaussian noise with a 1/f power spectrum (white noise shaped in
// the frequency domain, DC removed), scaled to exactly `rms`.
std::vector<double> pink_noise(std::size_t n, double rms, Rng& rng);

// exp(depth * u(t)) for a unit-variance Gaussian process u band-limited
// below `cutoff_hz`. Multiplying stationary noise by it gives the slowly
// waxing and waning background of real recordings.
std::vector<double> slow_envelope(std::size_t n, double fs, double depth, Rng& rng, double cutoff_hz = 1.0);

}  // namespace wcst::synth
