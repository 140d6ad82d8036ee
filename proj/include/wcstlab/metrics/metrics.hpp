#pragma once

#include <optional>
#include <span>
#include <vector>

#include "wcstlab/task/trial_log.hpp"

namespace wcst::metrics {

using task::RuleDimension;
using task::TrialRecord;

struct BlockSummary {
  int block_index = 0;
  RuleDimension rule = RuleDimension::Color;
  int n_trials = 0;
  bool completed = false;
  // Trials before the terminal correct streak; n_trials when censored.
  int latency = 0;
  int perseverative_errors = 0;
  int total_errors = 0;

  double per_contribution() const {
    return static_cast<double>(perseverative_errors) / std::max(total_errors, 1);
  }
};

struct SessionMetrics {
  double acc = 0.0;           // percent
  std::optional<double> per;  // absent when no block after the first exists
  int rc = 0;
  double mean_latency = 0.0;
  int n_trials = 0;
  std::vector<BlockSummary> blocks;
};

// `trials` must be contiguous records of one block. Perseverative errors are
// wrong presses of the key the previous block's rule indicates.
BlockSummary summarize_block(std::span<const TrialRecord> trials,
                             std::optional<RuleDimension> previous_rule, int switch_streak);

SessionMetrics summarize_session(const task::TrialLog& log);

enum class TrialPhase { Search, Confirm };

// Per-trial search/confirmation label: a trial is Search while it precedes
// its block's terminal streak (its position < block latency), else Confirm.
std::vector<TrialPhase> classify_phases(const task::TrialLog& log);

}  // namespace wcst::metrics
