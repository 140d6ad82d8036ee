#include "wcstlab/service/batch.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include <fmt/format.h>

#include "wcstlab/agents/closed_loop.hpp"
#include "wcstlab/errors.hpp"
#include "wcstlab/random.hpp"

namespace wcst::service {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

SessionOutcome run_one(const BatchOptions& opt, int i) {
  SessionOutcome out;
  auto cfg = opt.session;
  cfg.seed = opt.session.seed + static_cast<std::uint64_t>(i);
  out.seed = cfg.seed;
  try {
    task::Session session(cfg);
    auto spec = opt.agent;
    spec.seed = mix_seed(opt.agent.seed, static_cast<std::uint64_t>(i));
    auto agent = agents::make_agent(spec, session);
    const auto loop = agents::run_closed_loop(session, *agent);
    out.agent_errors = loop.agent_errors;
    if (loop.agent_errors > 0) {
      out.error = fmt::format("{} agent failures recorded as timeouts; first: {}", loop.agent_errors,
                              loop.error_messages.empty() ? "?" : loop.error_messages.front());
    }
    out.log = session.to_log();
    out.metrics = metrics::summarize_session(*out.log);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

BatchResult run_batch(const BatchOptions& options) {
  if (options.n_sessions < 1) throw ConfigError(fmt::format("n_sessions must be >= 1 (got {})", options.n_sessions));
  options.session.validate();

  BatchResult result;
  result.label = options.label.empty() ? std::string(agents::to_string(options.agent.kind)) : options.label;
  result.sessions.resize(static_cast<std::size_t>(options.n_sessions));

  const int hw = std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  const int n_threads = std::clamp(options.threads > 0 ? options.threads : hw, 1, options.n_sessions);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < options.n_sessions; i = next++) {
      result.sessions[static_cast<std::size_t>(i)] = run_one(options, i);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<metrics::SessionMetrics> ok;
  for (const auto& s : result.sessions) {
    if (s.metrics) ok.push_back(*s.metrics);
  }
  if (!ok.empty()) result.aggregate = metrics::aggregate(result.label, ok);
  return result;
}

std::string sessions_csv(std::span<const BatchResult> batches) {
  std::string out = "label,session,seed,acc,per,rc,latency,n_trials,agent_errors,error\n";
  for (const auto& b : batches) {
    for (std::size_t i = 0; i < b.sessions.size(); ++i) {
      const auto& s = b.sessions[i];
      if (s.metrics) {
        const auto& m = *s.metrics;
        fmt::format_to(std::back_inserter(out), "{},{},{},{:.1f},{},{},{:.2f},{},{},{}\n", csv_field(b.label), i, s.seed,
                       m.acc, m.per ? fmt::format("{:.2f}", *m.per) : "", m.rc, m.mean_latency, m.n_trials,
                       s.agent_errors, csv_field(s.error));
      } else {
        fmt::format_to(std::back_inserter(out), "{},{},{},,,,,,{},{}\n", csv_field(b.label), i, s.seed, s.agent_errors,
                       csv_field(s.error));
      }
    }
  }
  return out;
}

metrics::ReportTable batch_report(std::span<const BatchResult> batches, const metrics::ReportOptions& options) {
  std::vector<metrics::ReportRow> rows;
  for (const auto& b : batches) {
    if (b.aggregate) rows.push_back(*b.aggregate);
  }
  if (rows.empty()) throw EmptyInputError("no batch produced metrics");
  return metrics::ReportTable(std::move(rows), options);
}

}  // namespace wcst::service
