#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wcstlab/random.hpp"
#include "wcstlab/task/cards.hpp"

namespace wcst::task {

struct SessionConfig {
  std::uint64_t seed = 0;
  int n_blocks = 6;
  int switch_streak = 10;
  double response_window = 3.0;  // seconds, measured from stimulus onset
  int max_trials = 512;          // censoring bound
  double fixation_duration = 0.5;
  double feedback_duration = 1.0;

  // Throws ConfigError naming the violated bound.
  void validate() const;

  friend bool operator==(const SessionConfig&, const SessionConfig&) = default;
};

struct TrialSpec {
  std::array<Card, kNumKeys> key_cards{};
  Card stimulus{};
  int trial_index = 0;
  int block_index = 0;
  RuleDimension active_rule = RuleDimension::Color;  // never shown to agents

  friend bool operator==(const TrialSpec&, const TrialSpec&) = default;
};

// Seconds relative to session start; non-decreasing in declaration order.
struct EventTimes {
  double fixation_on = 0.0;
  double keys_on = 0.0;
  double stimulus_on = 0.0;
  double response = 0.0;
  double feedback_on = 0.0;

  bool ordered() const;
  friend bool operator==(const EventTimes&, const EventTimes&) = default;
};

struct TrialRecord {
  TrialSpec spec;
  Choice choice;
  bool correct = false;
  std::optional<double> rt;  // absent on timeout
  EventTimes times;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

enum class Phase { AwaitingResponse, Finished };

class TrialLog;

// Single-owner WCST state machine. Card draws and the rule schedule come from
// one seeded generator, so (seed, choices) determines every record.
class Session {
 public:
  explicit Session(SessionConfig config, std::string session_id = {});

  // Returns the pending trial, drawing a new one if none is pending. `now`
  // (seconds since session start) moves the timeline forward for live use.
  const TrialSpec& next_trial(std::optional<double> now = std::nullopt);

  // Evaluates the pending trial. `rt` is required for key choices and must
  // lie in [0, response_window]; it is ignored for timeouts.
  const TrialRecord& submit_choice(Choice choice, std::optional<double> rt);

  const SessionConfig& config() const { return config_; }
  const std::string& session_id() const { return session_id_; }
  const std::vector<RuleDimension>& rule_schedule() const { return schedule_; }
  int current_block() const { return current_block_; }
  int current_streak() const { return current_streak_; }
  RuleDimension active_rule() const { return schedule_[current_block_]; }
  const std::vector<TrialRecord>& trials() const { return trials_; }
  Phase phase() const { return phase_; }
  bool finished() const { return phase_ == Phase::Finished; }
  bool has_pending() const { return pending_.has_value(); }
  const TrialSpec& pending() const;
  // Scheduled stimulus onset of the pending trial.
  double pending_stimulus_onset() const;
  double clock() const { return cursor_; }

  TrialLog to_log() const;

 private:
  Card draw_stimulus();

  SessionConfig config_;
  std::string session_id_;
  Rng rng_;
  std::vector<RuleDimension> schedule_;
  int current_block_ = 0;
  int current_streak_ = 0;
  std::vector<TrialRecord> trials_;
  std::optional<TrialSpec> pending_;
  EventTimes pending_times_;
  std::optional<Card> previous_stimulus_;
  Phase phase_ = Phase::AwaitingResponse;
  double cursor_ = 0.0;
};

// First four blocks: a random permutation of the dimensions; later blocks:
// uniform over the three dimensions other than the preceding block's.
std::vector<RuleDimension> make_rule_schedule(int n_blocks, Rng& rng);

}  // namespace wcst::task
