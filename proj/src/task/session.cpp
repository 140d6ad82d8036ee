#include "wcstlab/task/session.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "wcstlab/errors.hpp"
#include "wcstlab/task/trial_log.hpp"

namespace wcst::task {

void SessionConfig::validate() const {
  if (n_blocks < 1) throw ConfigError(fmt::format("n_blocks must be >= 1 (got {})", n_blocks));
  if (switch_streak < 1) {
    throw ConfigError(fmt::format("switch_streak must be >= 1 (got {})", switch_streak));
  }
  if (!(response_window > 0.0)) {
    throw ConfigError(fmt::format("response_window must be > 0 (got {})", response_window));
  }
  if (max_trials < n_blocks * switch_streak) {
    throw ConfigError(fmt::format("max_trials must be >= n_blocks * switch_streak = {} (got {})",
                                  n_blocks * switch_streak, max_trials));
  }
  if (fixation_duration < 0.0) {
    throw ConfigError(fmt::format("fixation_duration must be >= 0 (got {})", fixation_duration));
  }
  if (feedback_duration < 0.0) {
    throw ConfigError(fmt::format("feedback_duration must be >= 0 (got {})", feedback_duration));
  }
}

bool EventTimes::ordered() const {
  return fixation_on <= keys_on && keys_on <= stimulus_on && stimulus_on <= response &&
         response <= feedback_on;
}

std::vector<RuleDimension> make_rule_schedule(int n_blocks, Rng& rng) {
  std::array<RuleDimension, kNumDimensions> first = kAllRules;
  // Fisher-Yates
  for (int i = kNumDimensions - 1; i > 0; --i) {
    std::swap(first[i], first[uniform_index(rng, i + 1)]);
  }
  std::vector<RuleDimension> schedule;
  schedule.reserve(n_blocks);
  for (int b = 0; b < n_blocks; ++b) {
    if (b < kNumDimensions) {
      schedule.push_back(first[b]);
      continue;
    }
    const int prev = to_index(schedule.back());
    int pick = uniform_index(rng, kNumDimensions - 1);
    if (pick >= prev) ++pick;
    schedule.push_back(static_cast<RuleDimension>(pick));
  }
  return schedule;
}

Session::Session(SessionConfig config, std::string session_id)
    : config_(config), session_id_(std::move(session_id)), rng_(config.seed) {
  config_.validate();
  if (session_id_.empty()) session_id_ = fmt::format("s{}", config_.seed);
  schedule_ = make_rule_schedule(config_.n_blocks, rng_);
}

Card Session::draw_stimulus() {
  for (;;) {
    Card c = stimulus_from_index(uniform_index(rng_, kNumStimuli));
    if (!previous_stimulus_ || c != *previous_stimulus_) return c;
  }
}

const TrialSpec& Session::next_trial(std::optional<double> now) {
  if (finished()) throw SessionCompleteError("session " + session_id_ + " is finished");
  if (pending_) return *pending_;

  TrialSpec spec;
  spec.key_cards = key_cards();
  spec.stimulus = draw_stimulus();
  spec.trial_index = static_cast<int>(trials_.size());
  spec.block_index = current_block_;
  spec.active_rule = active_rule();
  previous_stimulus_ = spec.stimulus;

  const double start = std::max(cursor_, now.value_or(cursor_));
  pending_times_ = EventTimes{};
  pending_times_.fixation_on = start;
  pending_times_.keys_on = start + config_.fixation_duration;
  pending_times_.stimulus_on = pending_times_.keys_on;
  pending_ = spec;
  return *pending_;
}

const TrialSpec& Session::pending() const {
  if (!pending_) throw ProtocolError("no pending trial");
  return *pending_;
}

double Session::pending_stimulus_onset() const {
  if (!pending_) throw ProtocolError("no pending trial");
  return pending_times_.stimulus_on;
}

const TrialRecord& Session::submit_choice(Choice choice, std::optional<double> rt) {
  if (finished()) throw SessionCompleteError("session " + session_id_ + " is finished");
  if (!pending_) throw ProtocolError("submit_choice without a pending trial");
  if (!choice.is_timeout()) {
    if (!rt) throw InputError("rt is required for a key choice");
    if (!(*rt >= 0.0) || *rt > config_.response_window) {
      throw InputError(fmt::format("rt {} outside [0, {}]", *rt, config_.response_window));
    }
  }

  TrialRecord rec;
  rec.spec = *pending_;
  rec.choice = choice;
  rec.correct = !choice.is_timeout() &&
                choice.key_index() == indicated_key(rec.spec.stimulus, rec.spec.active_rule);
  rec.rt = choice.is_timeout() ? std::nullopt : rt;
  rec.times = pending_times_;
  rec.times.response = rec.times.stimulus_on + (rec.rt ? *rec.rt : config_.response_window);
  rec.times.feedback_on = rec.times.response;
  cursor_ = rec.times.feedback_on + config_.feedback_duration;

  trials_.push_back(rec);
  pending_.reset();

  current_streak_ = rec.correct ? current_streak_ + 1 : 0;
  if (current_streak_ >= config_.switch_streak) {
    current_streak_ = 0;
    if (current_block_ + 1 >= config_.n_blocks) {
      phase_ = Phase::Finished;
    } else {
      ++current_block_;
    }
  }
  if (static_cast<int>(trials_.size()) >= config_.max_trials) phase_ = Phase::Finished;
  return trials_.back();
}

TrialLog Session::to_log() const { return TrialLog(session_id_, config_, trials_); }

}  // namespace wcst::task
