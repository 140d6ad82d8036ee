#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "wcstlab/eeg/recording.hpp"

namespace wcst::erp {

enum class Condition { Conf, Search, Cor, Inc };

std::string_view to_string(Condition c);
Condition condition_from_string(std::string_view name);  // "CONF", "SEARCH", "COR", "INC"

enum class Lock { Stimulus, Feedback };

std::string_view to_string(Lock lock);
Lock lock_from_string(std::string_view name);  // "stimulus" | "feedback"

// Sample grid of an epoch: sample i sits at (offset + i) / fs seconds.
struct TimeAxis {
  double fs = 1000.0;
  std::int64_t offset = 0;
  Eigen::Index n_samples = 0;

  double time(Eigen::Index i) const { return static_cast<double>(offset + i) / fs; }
};

struct EpochWindow {
  double tmin = -0.1;  // also the start of the baseline
  double tmax = 0.5;   // exclusive
};

// Half-open window [tmin, tmax) of length round((tmax - tmin) * fs).
TimeAxis make_time_axis(double fs, const EpochWindow& window = {});

struct Epoch {
  Condition condition = Condition::Conf;
  Eigen::MatrixXd data;  // EEG channels x samples, baseline-corrected
  std::int64_t event_sample = 0;
  std::string participant;
};

struct EpochSet {
  std::vector<std::string> channel_names;  // EEG channels only
  TimeAxis axis;
  std::vector<Epoch> epochs;
  int skipped = 0;  // events too close to an edge

  std::vector<const Epoch*> of(Condition c) const;
};

// One epoch per condition marker (COND_CONF/COND_SEARCH for stimulus lock,
// FB_COR/FB_INC for feedback lock). Baseline is the mean over [tmin, 0).
// Throws EmptyInputError when no epoch survives.
EpochSet epoch(const eeg::Recording& rec, Lock lock, std::string participant = {}, const EpochWindow& window = {});

}  // namespace wcst::erp
