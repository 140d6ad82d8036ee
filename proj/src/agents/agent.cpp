#include "wcstlab/agents/agent.hpp"

#include <fmt/format.h>

#include "wcstlab/agents/hypothesis.hpp"
#include "wcstlab/agents/remote.hpp"
#include "wcstlab/errors.hpp"

namespace wcst::agents {

Observation observe(const task::Session& session) {
  const auto& spec = session.pending();
  Observation obs;
  obs.session_id = session.session_id();
  obs.trial_index = spec.trial_index;
  obs.key_cards = spec.key_cards;
  obs.stimulus = spec.stimulus;
  obs.history.reserve(session.trials().size());
  for (const auto& r : session.trials()) obs.history.push_back({r.choice, r.correct});
  return obs;
}

Choice OracleAgent::choose(const Observation& obs) {
  return Choice::key(task::indicated_key(obs.stimulus, probe_()) + 1);
}

Choice RandomAgent::choose(const Observation&) {
  return Choice::key(uniform_index(rng_, task::kNumKeys) + 1);
}

ScriptedAgent::ScriptedAgent(std::vector<Choice> script) : script_(std::move(script)) {
  if (script_.empty()) throw InputError("scripted agent needs at least one choice");
}

Choice ScriptedAgent::choose(const Observation& obs) {
  return script_[static_cast<std::size_t>(obs.trial_index) % script_.size()];
}

std::string_view to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::Oracle:
      return "oracle";
    case AgentKind::Random:
      return "random";
    case AgentKind::HypothesisTesting:
      return "hypothesis";
    case AgentKind::Perseverative:
      return "perseverative";
    case AgentKind::Remote:
      return "remote";
    case AgentKind::Scripted:
      return "scripted";
  }
  return "unknown";
}

AgentKind agent_kind_from_string(std::string_view name) {
  for (auto k : {AgentKind::Oracle, AgentKind::Random, AgentKind::HypothesisTesting,
                 AgentKind::Perseverative, AgentKind::Remote, AgentKind::Scripted}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError(fmt::format("unknown agent kind '{}'", name));
}

std::unique_ptr<Agent> make_agent(const AgentSpec& spec, const task::Session& session) {
  switch (spec.kind) {
    case AgentKind::Oracle:
      return std::make_unique<OracleAgent>([&session] { return session.active_rule(); });
    case AgentKind::Random:
      return std::make_unique<RandomAgent>(spec.seed);
    case AgentKind::HypothesisTesting:
      return std::make_unique<HypothesisAgent>(kDefaultTryOrder, spec.lapse_rate, spec.seed);
    case AgentKind::Perseverative:
      return std::make_unique<PerseverativeAgent>();
    case AgentKind::Remote: {
      if (spec.endpoint.empty()) throw ConfigError("remote agent requires an endpoint");
      return std::make_unique<RemoteAgent>(RemoteEndpoint::parse(spec.endpoint),
                                           RemoteOptions{spec.remote_timeout_s, spec.strict});
    }
    case AgentKind::Scripted:
      return std::make_unique<ScriptedAgent>(spec.script);
  }
  throw ConfigError("unhandled agent kind");
}

}  // namespace wcst::agents
