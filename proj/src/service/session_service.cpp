#include "wcstlab/service/session_service.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <json.hpp>

#include "wcstlab/agents/agent.hpp"
#include "wcstlab/agents/remote.hpp"
#include "wcstlab/agents/render.hpp"
#include "wcstlab/errors.hpp"
#include "wcstlab/random.hpp"
#include "wcstlab/task/trial_log.hpp"

namespace wcst::service {

namespace {

using json = nlohmann::json;

Response error(int status, const std::string& msg) {
  return {status, "application/json", json{{"error", msg}}.dump()};
}

Response ok(const json& j) { return {200, "application/json", j.dump()}; }

task::SessionConfig apply_overrides(task::SessionConfig cfg, const json& j) {
  if (!j.is_object()) throw ConfigError("config must be an object");
  for (const auto& [k, v] : j.items()) {
    auto number = [&]() {
      if (!v.is_number()) throw ConfigError(fmt::format("config.{} must be a number", k));
      return v.get<double>();
    };
    auto integer = [&]() {
      if (!v.is_number_integer()) throw ConfigError(fmt::format("config.{} must be an integer", k));
      return v.get<int>();
    };
    if (k == "n_blocks") {
      cfg.n_blocks = integer();
    } else if (k == "switch_streak") {
      cfg.switch_streak = integer();
    } else if (k == "max_trials") {
      cfg.max_trials = integer();
    } else if (k == "response_window") {
      cfg.response_window = number();
    } else if (k == "fixation_duration") {
      cfg.fixation_duration = number();
    } else if (k == "feedback_duration") {
      cfg.feedback_duration = number();
    } else {
      throw ConfigError(fmt::format("unknown config key '{}'", k));
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace

double SteadyClock::now() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

SessionService::SessionService(ServiceConfig config, std::shared_ptr<const Clock> clock)
    : config_(std::move(config)), clock_(std::move(clock)) {}

std::shared_ptr<SessionService::Entry> SessionService::find(std::string_view id) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::vector<std::string> SessionService::session_ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, e] : sessions_) ids.push_back(id);
  return ids;
}

Response SessionService::create_session(std::string_view body) {
  json req = json::object();
  if (!body.empty()) {
    req = json::parse(body, nullptr, false);
    if (req.is_discarded() || !req.is_object()) return error(400, "request body must be a JSON object");
  }
  try {
    for (const auto& [k, v] : req.items()) {
      if (k != "seed" && k != "config") throw ConfigError(fmt::format("unknown field '{}'", k));
    }
    auto cfg = config_.defaults;
    if (req.contains("config")) cfg = apply_overrides(cfg, req.at("config"));
    cfg.validate();

    std::lock_guard lock(mutex_);
    const auto n = counter_++;
    if (req.contains("seed") && !req.at("seed").is_null()) {
      if (!req.at("seed").is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
      cfg.seed = req.at("seed").get<std::uint64_t>();
    } else {
      cfg.seed = mix_seed(config_.base_seed, n);
    }
    const auto id = fmt::format("s{:04d}", n);
    sessions_.emplace(id, std::make_shared<Entry>(cfg, id, clock_->now()));
    return ok(json{{"session_id", id}});
  } catch (const ConfigError& e) {
    return error(400, e.what());
  }
}

Response SessionService::get_trial(std::string_view id) {
  const auto entry = find(id);
  if (!entry) return error(404, fmt::format("unknown session '{}'", id));
  std::lock_guard lock(entry->mutex);
  auto& s = entry->session;
  if (s.finished()) return {409, "application/json", json{{"error", "session complete"}, {"finished", true}}.dump()};
  s.next_trial(clock_->now() - entry->created_at);
  auto payload = agents::trial_payload(agents::observe(s));
  payload["response_window_s"] = s.config().response_window;
  payload["fixation_s"] = s.config().fixation_duration;
  payload["feedback_s"] = s.config().feedback_duration;
  return ok(payload);
}

Response SessionService::post_choice(std::string_view id, std::string_view body) {
  const auto entry = find(id);
  if (!entry) return error(404, fmt::format("unknown session '{}'", id));
  const auto req = json::parse(body, nullptr, false);
  if (req.is_discarded() || !req.is_object() || !req.contains("choice")) {
    return error(400, "request body must be a JSON object with a choice field");
  }
  std::optional<double> client_rt;
  if (req.contains("rt_s") && !req.at("rt_s").is_null()) {
    if (!req.at("rt_s").is_number() || req.at("rt_s").get<double>() < 0.0) {
      return error(400, "rt_s must be a non-negative number");
    }
    client_rt = req.at("rt_s").get<double>();
  }
  task::Choice choice = task::Choice::timeout();
  const auto& c = req.at("choice");
  if (!c.is_null()) {
    if (!c.is_number_integer() || c.get<long long>() < 1 || c.get<long long>() > 4) {
      return error(400, "choice must be an integer 1-4 or null");
    }
    choice = task::Choice::key(c.get<int>());
  }

  std::lock_guard lock(entry->mutex);
  auto& s = entry->session;
  if (s.finished()) return {409, "application/json", json{{"error", "session complete"}, {"finished", true}}.dump()};
  if (!s.has_pending()) return error(409, "no pending trial; request one with GET /sessions/{id}/trial first");

  const double window = s.config().response_window;
  const double elapsed = clock_->now() - entry->created_at - s.pending_stimulus_onset();
  std::optional<double> rt;
  if (!choice.is_timeout()) {
    if (elapsed > window || (client_rt && *client_rt > window)) {
      choice = task::Choice::timeout();
    } else {
      rt = client_rt.value_or(std::clamp(elapsed, 0.0, window));
    }
  }
  try {
    const auto& rec = s.submit_choice(choice, rt);
    return ok(json{{"trial_index", rec.spec.trial_index},
                   {"correct", rec.correct},
                   {"timeout", rec.choice.is_timeout()},
                   {"feedback", rec.correct ? "Correct" : "Incorrect"},
                   {"finished", s.finished()}});
  } catch (const ProtocolError& e) {
    return error(409, e.what());
  } catch (const InputError& e) {
    return error(400, e.what());
  }
}

Response SessionService::get_log(std::string_view id) {
  const auto entry = find(id);
  if (!entry) return error(404, fmt::format("unknown session '{}'", id));
  std::lock_guard lock(entry->mutex);
  return {200, "application/x-ndjson", entry->session.to_log().to_jsonl()};
}

Response SessionService::render_svg(std::string_view id) {
  const auto entry = find(id);
  if (!entry) return error(404, fmt::format("unknown session '{}'", id));
  std::lock_guard lock(entry->mutex);
  const auto& s = entry->session;
  if (!s.has_pending()) return error(409, "no pending trial; request one with GET /sessions/{id}/trial first");
  const auto& spec = s.pending();
  return {200, "image/svg+xml", agents::render_trial_svg(spec.key_cards, spec.stimulus)};
}

}  // namespace wcst::service
