#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wcstlab/agents/agent.hpp"
#include "wcstlab/metrics/report.hpp"
#include "wcstlab/task/session.hpp"
#include "wcstlab/task/trial_log.hpp"

namespace wcst::service {

struct BatchOptions {
  std::string label;  // defaults to the agent kind
  agents::AgentSpec agent;
  task::SessionConfig session;  // session i uses seed session.seed + i
  int n_sessions = 1;
  int threads = 0;  // 0: hardware concurrency
};

struct SessionOutcome {
  std::uint64_t seed = 0;
  std::optional<metrics::SessionMetrics> metrics;
  std::optional<task::TrialLog> log;
  int agent_errors = 0;
  std::string error;  // empty when the session ran cleanly
};

struct BatchResult {
  std::string label;
  std::vector<SessionOutcome> sessions;    // in session order
  std::optional<metrics::ReportRow> aggregate;  // absent when no session produced metrics
};

// Runs the closed loops in parallel. Failures are recorded per session and
// never stop the batch.
BatchResult run_batch(const BatchOptions& options);

// label,session,seed,acc,per,rc,latency,n_trials,agent_errors,error
std::string sessions_csv(std::span<const BatchResult> batches);

metrics::ReportTable batch_report(std::span<const BatchResult> batches, const metrics::ReportOptions& options = {});

}  // namespace wcst::service
