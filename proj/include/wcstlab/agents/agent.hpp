#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "wcstlab/random.hpp"
#include "wcstlab/task/session.hpp"

namespace wcst::agents {

using task::Card;
using task::Choice;
using task::RuleDimension;

struct HistoryEntry {
  Choice choice;
  bool correct = false;
};

// What an agent is allowed to see. There is deliberately no field for the
// active rule, block index, streak or switch events.
struct Observation {
  std::string session_id;
  int trial_index = 0;
  std::array<Card, task::kNumKeys> key_cards{};
  Card stimulus{};
  std::vector<HistoryEntry> history;  // all prior trials in the session
  static constexpr bool block_feedback_reset = false;
};

// Builds the observation for the session's pending trial.
Observation observe(const task::Session& session);

class Agent {
 public:
  virtual ~Agent() = default;
  virtual Choice choose(const Observation& obs) = 0;
  virtual std::string_view name() const = 0;
  // Simulated response time logged for this agent's key presses.
  virtual double response_time() const { return 1.0; }
};

// Privileged reference agent: reads the active rule through a probe.
class OracleAgent final : public Agent {
 public:
  explicit OracleAgent(std::function<RuleDimension()> rule_probe) : probe_(std::move(rule_probe)) {}
  Choice choose(const Observation& obs) override;
  std::string_view name() const override { return "oracle"; }

 private:
  std::function<RuleDimension()> probe_;
};

class RandomAgent final : public Agent {
 public:
  explicit RandomAgent(std::uint64_t seed) : rng_(seed) {}
  Choice choose(const Observation& obs) override;
  std::string_view name() const override { return "random"; }

 private:
  Rng rng_;
};

// Replays a fixed choice list, cycling when exhausted.
class ScriptedAgent final : public Agent {
 public:
  explicit ScriptedAgent(std::vector<Choice> script);
  Choice choose(const Observation& obs) override;
  std::string_view name() const override { return "scripted"; }

 private:
  std::vector<Choice> script_;
};

enum class AgentKind { Oracle, Random, HypothesisTesting, Perseverative, Remote, Scripted };

std::string_view to_string(AgentKind kind);
AgentKind agent_kind_from_string(std::string_view name);

struct AgentSpec {
  AgentKind kind = AgentKind::Oracle;
  std::uint64_t seed = 0;
  std::string endpoint;              // Remote
  double remote_timeout_s = 30.0;    // Remote
  bool strict = false;               // Remote reply parsing
  std::vector<Choice> script;        // Scripted
  double lapse_rate = 0.0;           // HypothesisTesting
};

// Creates an agent bound to `session` (the oracle reads its rule).
std::unique_ptr<Agent> make_agent(const AgentSpec& spec, const task::Session& session);

}  // namespace wcst::agents
