#include "wcstlab/metrics/metrics.hpp"

#include <algorithm>

#include "wcstlab/errors.hpp"

namespace wcst::metrics {

namespace {

// [begin, end) index ranges of contiguous block runs.
std::vector<std::pair<std::size_t, std::size_t>> block_runs(const std::vector<TrialRecord>& records) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= records.size(); ++i) {
    if (i == records.size() || records[i].spec.block_index != records[begin].spec.block_index) {
      runs.emplace_back(begin, i);
      begin = i;
    }
  }
  return runs;
}

}  // namespace

BlockSummary summarize_block(std::span<const TrialRecord> trials,
                             std::optional<RuleDimension> previous_rule, int switch_streak) {
  if (trials.empty()) throw EmptyInputError("summarize_block: no trials");
  BlockSummary s;
  s.block_index = trials.front().spec.block_index;
  s.rule = trials.front().spec.active_rule;
  s.n_trials = static_cast<int>(trials.size());
  for (const auto& t : trials) {
    if (t.spec.block_index != s.block_index) {
      throw InputError("summarize_block: trials span more than one block");
    }
    if (t.correct) continue;
    ++s.total_errors;
    if (previous_rule && !t.choice.is_timeout() &&
        t.choice.key_index() == task::indicated_key(t.spec.stimulus, *previous_rule)) {
      ++s.perseverative_errors;
    }
  }
  s.completed = s.n_trials >= switch_streak &&
                std::all_of(trials.end() - switch_streak, trials.end(), [](const auto& t) { return t.correct; });
  s.latency = s.completed ? s.n_trials - switch_streak : s.n_trials;
  return s;
}

SessionMetrics summarize_session(const task::TrialLog& log) {
  const auto& records = log.records();
  if (records.empty()) throw EmptyInputError("summarize_session: empty log");
  SessionMetrics m;
  m.n_trials = static_cast<int>(records.size());
  const auto n_correct = std::count_if(records.begin(), records.end(), [](const auto& r) { return r.correct; });
  m.acc = 100.0 * static_cast<double>(n_correct) / static_cast<double>(records.size());

  std::optional<RuleDimension> previous;
  int completed = 0;
  double latency_sum = 0.0;
  double per_sum = 0.0;
  int per_blocks = 0;
  for (const auto& [begin, end] : block_runs(records)) {
    auto block = summarize_block(std::span(records).subspan(begin, end - begin), previous,
                                 log.config().switch_streak);
    completed += block.completed ? 1 : 0;
    latency_sum += block.latency;
    if (previous) {
      per_sum += block.per_contribution();
      ++per_blocks;
    }
    previous = block.rule;
    m.blocks.push_back(block);
  }
  m.rc = std::max(completed - 1, 0);
  m.mean_latency = latency_sum / static_cast<double>(m.blocks.size());
  if (per_blocks > 0) m.per = per_sum / per_blocks;
  return m;
}

std::vector<TrialPhase> classify_phases(const task::TrialLog& log) {
  const auto& records = log.records();
  std::vector<TrialPhase> phases(records.size(), TrialPhase::Search);
  for (const auto& [begin, end] : block_runs(records)) {
    const auto block =
        summarize_block(std::span(records).subspan(begin, end - begin), std::nullopt, log.config().switch_streak);
    for (std::size_t i = begin; i < end; ++i) {
      phases[i] = static_cast<int>(i - begin) < block.latency ? TrialPhase::Search : TrialPhase::Confirm;
    }
  }
  return phases;
}

}  // namespace wcst::metrics
