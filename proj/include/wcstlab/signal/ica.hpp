#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wcstlab/eeg/recording.hpp"

namespace wcst::signal {

struct IcaOptions {
  double variance_target = 0.999;
  std::uint64_t seed = 0;
  double tolerance = 1e-6;
  int max_iterations = 500;
  double r_threshold = 0.4;  // used to fill IcaModel::rejected
  int fit_decimation = 1;    // fit on every k-th sample; sources use all samples
};

// Fitted on the EEG-role channels; EOG channels only serve as references for
// the correlation criterion.
struct IcaModel {
  std::vector<std::string> channel_names;  // EEG channels the model spans
  Eigen::VectorXd channel_means;
  Eigen::MatrixXd whitening;  // components x channels
  Eigen::MatrixXd unmixing;   // components x channels
  Eigen::MatrixXd mixing;     // channels x components
  eeg::Matrix sources;        // components x samples
  double retained_variance = 0.0;
  int iterations = 0;
  std::vector<double> eog_correlations;  // per component, max |r| over EOG channels
  std::vector<int> rejected;

  Eigen::Index n_components() const { return unmixing.rows(); }
};

// PCA whitening to the smallest component count reaching `variance_target`,
// then symmetric FastICA (tanh contrast) from a seeded orthonormal start.
// Throws ConvergenceError after max_iterations.
IcaModel ica_fit(const eeg::Recording& rec, const IcaOptions& options = {});

// Zeroes components whose max |r| with an EOG channel exceeds `r_threshold`
// and rebuilds the EEG channels through the mixing matrix.
eeg::Recording ica_clean(const eeg::Recording& rec, const IcaModel& model, double r_threshold = 0.4);

double pearson(std::span<const double> a, std::span<const double> b);

}  // namespace wcst::signal
