#include <gtest/gtest.h>

#include "mock_agent.hpp"
#include "wcstlab/agents/agent.hpp"
#include "wcstlab/agents/closed_loop.hpp"
#include "wcstlab/agents/hypothesis.hpp"
#include "wcstlab/agents/remote.hpp"
#include "wcstlab/agents/render.hpp"
#include "wcstlab/errors.hpp"
#include "wcstlab/metrics/metrics.hpp"

using namespace wcst;
using namespace wcst::agents;
using task::Session;
using task::SessionConfig;

namespace {

Observation observation_for(const Card& stimulus, int trial_index = 0) {
  Observation obs;
  obs.key_cards = task::key_cards();
  obs.stimulus = stimulus;
  obs.trial_index = trial_index;
  return obs;
}

// A stimulus whose `rule` attribute is `value`.
Card stimulus_with(RuleDimension rule, int value) {
  for (int i = 0; i < task::kNumStimuli; ++i) {
    const auto c = task::stimulus_from_index(i);
    if (c.attribute(rule) == value) return c;
  }
  throw std::logic_error("unreachable");
}

}  // namespace

TEST(Oracle, ShapeRule) {
  OracleAgent oracle([] { return RuleDimension::Shape; });
  EXPECT_EQ(oracle.choose(observation_for(stimulus_with(RuleDimension::Shape, 1))).key(), 2);
}

TEST(Oracle, FullSessionIsPerfect) {
  Session s(SessionConfig{});
  OracleAgent oracle([&s] { return s.active_rule(); });
  run_closed_loop(s, oracle);
  const auto m = metrics::summarize_session(s.to_log());
  EXPECT_DOUBLE_EQ(m.acc, 100.0);
  EXPECT_EQ(m.rc, 5);
  for (const auto& b : m.blocks) EXPECT_EQ(b.latency, 0);
}

TEST(Random, AccuracyNearChanceOver10000Trials) {
  SessionConfig c;
  c.n_blocks = 1;
  c.switch_streak = 10000;
  c.max_trials = 10000;
  c.seed = 5;
  Session s(c);
  RandomAgent agent(17);
  run_closed_loop(s, agent);
  int correct = 0;
  for (const auto& t : s.trials()) correct += t.correct;
  EXPECT_EQ(s.trials().size(), 10000u);
  EXPECT_NEAR(correct / 100.0, 25.0, 2.0);
}

TEST(HypothesisUpdate, CorrectNarrowsToIndicatingRule) {
  const Card stim = task::stimulus_from_index(5);
  RuleSet beliefs;
  beliefs.insert(RuleDimension::Color);
  beliefs.insert(RuleDimension::Shape);
  const int key = task::indicated_key(stim, RuleDimension::Color);
  EXPECT_EQ(hypothesis_update(beliefs, key, true, stim), RuleSet::only(RuleDimension::Color));
}

TEST(HypothesisUpdate, IncorrectRemovesExactlyOneOnPermutationStimulus) {
  for (int i = 0; i < task::kNumStimuli; ++i) {
    const Card stim = task::stimulus_from_index(i);
    for (int key = 0; key < 4; ++key) EXPECT_EQ(hypothesis_update(RuleSet::all(), key, false, stim).size(), 3);
  }
}

TEST(HypothesisUpdate, EmptyResultResetsToRulesNotIndicatingKey) {
  const Card stim = task::stimulus_from_index(0);
  const int key = task::indicated_key(stim, RuleDimension::Number);
  const auto out = hypothesis_update(RuleSet::only(RuleDimension::Number), key, false, stim);
  EXPECT_EQ(out.size(), 3);
  EXPECT_FALSE(out.contains(RuleDimension::Number));
}

// Every true rule and every sequence of four stimuli: the tester errs exactly
// as many times as the true rule's position in its try order.
TEST(HypothesisAgent, ExhaustiveIdentificationWithinThreeErrors) {
  double total_errors = 0;
  long runs = 0;
  for (auto truth : task::kAllRules) {
    int position = 0;
    while (kDefaultTryOrder[position] != truth) ++position;
    for (int a = 0; a < 24; ++a)
      for (int b = 0; b < 24; ++b)
        for (int c = 0; c < 24; ++c)
          for (int d = 0; d < 24; ++d) {
            HypothesisAgent agent;
            Observation obs = observation_for({});
            int errors = 0;
            for (int idx : {a, b, c, d}) {
              obs.stimulus = task::stimulus_from_index(idx);
              const auto choice = agent.choose(obs);
              const bool ok = choice.key_index() == task::indicated_key(obs.stimulus, truth);
              errors += !ok;
              obs.history.push_back({choice, ok});
              ++obs.trial_index;
            }
            ASSERT_EQ(errors, position);
            ASSERT_LE(errors, 3);
            total_errors += errors;
            ++runs;
          }
  }
  EXPECT_DOUBLE_EQ(total_errors / static_cast<double>(runs), (0 + 1 + 2 + 3) / 4.0);
}

TEST(HypothesisAgent, BeliefsShrinkWithinABlock) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SessionConfig c;
    c.seed = seed;
    Session s(c);
    HypothesisAgent agent;
    // sizes[k]: belief size after absorbing the feedback of trial k - 1.
    std::vector<int> sizes;
    while (!s.finished()) {
      s.next_trial();
      const auto choice = agent.choose(observe(s));
      sizes.push_back(agent.beliefs().size());
      s.submit_choice(choice, 1.0);
    }
    const auto& t = s.trials();
    for (std::size_t k = 1; k + 1 < sizes.size(); ++k) {
      if (t[k].spec.block_index == t[k - 1].spec.block_index) {
        EXPECT_LE(sizes[k + 1], sizes[k]) << seed << " trial " << k;
      }
    }
  }
}

TEST(HypothesisAgent, LatencyInHumanRange) {
  double total = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SessionConfig c;
    c.seed = seed;
    Session s(c);
    HypothesisAgent agent;
    run_closed_loop(s, agent);
    const auto m = metrics::summarize_session(s.to_log());
    EXPECT_EQ(m.rc, 5);
    total += m.mean_latency;
  }
  EXPECT_LE(total / 50, 10.0);
}

TEST(Perseverative, NeverLeavesFirstRule) {
  Session s(SessionConfig{});
  PerseverativeAgent agent;
  run_closed_loop(s, agent);
  const auto m = metrics::summarize_session(s.to_log());
  EXPECT_EQ(m.rc, 0);
  EXPECT_EQ(s.trials().size(), 512u);
}

TEST(Observation, CarriesNoRuleInformation) {
  SessionConfig c;
  c.seed = 1;
  Session s(c);
  s.next_trial();
  const auto payload = trial_payload(observe(s));
  for (const char* hidden : {"rule", "active_rule", "block_index", "streak", "schedule"}) {
    EXPECT_FALSE(payload.contains(hidden)) << hidden;
  }
  for (const char* key : {"session_id", "trial_index", "key_cards", "stimulus", "svg", "history"}) {
    EXPECT_TRUE(payload.contains(key)) << key;
  }
  EXPECT_EQ(payload["key_cards"].size(), 4u);
  EXPECT_EQ(payload["svg"].get<std::string>().rfind("<svg", 0), 0u);
}

TEST(Render, SvgHasFiveCards) {
  const auto svg = render_trial_svg(task::key_cards(), task::stimulus_from_index(3));
  std::size_t count = 0;
  for (auto p = svg.find("class=\"card\""); p != std::string::npos; p = svg.find("class=\"card\"", p + 1)) ++count;
  EXPECT_EQ(count, 5u);
}

TEST(ExtractChoice, LenientAndStrict) {
  EXPECT_EQ(extract_choice("3", false), 3);
  EXPECT_EQ(extract_choice("I choose card 2 because the colours match", false), 2);
  EXPECT_EQ(extract_choice(R"({"choice": 4})", true), 4);
  EXPECT_EQ(extract_choice(R"({"choice": "card 1"})", false), 1);
  EXPECT_EQ(extract_choice("card 2", true), std::nullopt);
  EXPECT_EQ(extract_choice("none of them 5 9 0", false), std::nullopt);
  EXPECT_EQ(extract_choice(R"({"choice": 7})", true), std::nullopt);
}

TEST(RemoteEndpoint, Parses) {
  const auto ep = RemoteEndpoint::parse("http://localhost:9000/v1/agent");
  EXPECT_EQ(ep.host, "localhost");
  EXPECT_EQ(ep.port, 9000);
  EXPECT_EQ(ep.path, "/v1/agent");
  EXPECT_THROW(RemoteEndpoint::parse("https://x"), ConfigError);
}

TEST(Remote, EchoMock) {
  MockAgentServer mock([](const nlohmann::json&) { return std::string("3"); });
  Session s(SessionConfig{});
  s.next_trial();
  const auto payload = trial_payload(observe(s));
  EXPECT_EQ(remote_round_trip(RemoteEndpoint::parse(mock.url()), payload), 3);
}

TEST(Remote, FreeTextMock) {
  MockAgentServer mock([](const nlohmann::json&) { return std::string("I choose card 2 because..."); });
  Session s(SessionConfig{});
  s.next_trial();
  EXPECT_EQ(remote_round_trip(RemoteEndpoint::parse(mock.url()), trial_payload(observe(s))), 2);
  RemoteOptions strict;
  strict.strict = true;
  EXPECT_THROW(remote_round_trip(RemoteEndpoint::parse(mock.url()), trial_payload(observe(s)), strict),
               RemoteProtocolError);
}

TEST(Remote, UnreachableEndpointLogsTimeouts) {
  SessionConfig c;
  c.n_blocks = 1;
  c.switch_streak = 1;
  c.max_trials = 3;
  Session s(c);
  RemoteAgent agent(RemoteEndpoint::parse("http://127.0.0.1:" + std::to_string(closed_port()) + "/"),
                    RemoteOptions{2.0, false});
  const auto r = run_closed_loop(s, agent);
  EXPECT_EQ(r.agent_errors, 3);
  for (const auto& t : s.trials()) {
    EXPECT_TRUE(t.choice.is_timeout());
    EXPECT_FALSE(t.correct);
  }
}

TEST(Remote, ReproducesScriptedAgentBitForBit) {
  const std::vector<int> script{2, 4, 1, 1, 3, 2, 4};
  MockAgentServer mock([&](const nlohmann::json& req) {
    const int i = req["trial_index"].get<int>();
    EXPECT_EQ(req["history"].size(), static_cast<std::size_t>(i));
    return nlohmann::json{{"choice", script[i % script.size()]}}.dump();
  });
  SessionConfig c;
  c.seed = 21;
  c.max_trials = 80;
  Session remote_session(c), local_session(c);
  RemoteAgent remote(RemoteEndpoint::parse(mock.url()));
  std::vector<Choice> local_script;
  for (int k : script) local_script.push_back(Choice::key(k));
  ScriptedAgent local(local_script);
  run_closed_loop(remote_session, remote);
  run_closed_loop(local_session, local);
  EXPECT_EQ(mock.requests(), 80);
  EXPECT_EQ(remote_session.trials(), local_session.trials());
  EXPECT_EQ(remote_session.to_log().to_jsonl(), local_session.to_log().to_jsonl());
}

TEST(Remote, StatelessHypothesisMockMatchesInProcessAgent) {
  // The mock rebuilds the tester's beliefs from the history it is sent.
  MockAgentServer mock([](const nlohmann::json& req) {
    static std::vector<Card> stimuli;
    if (req["trial_index"] == 0) stimuli.clear();
    Card stim;
    for (int d = 0; d < 4; ++d) stim.attributes[d] = req["stimulus"][d].get<std::uint8_t>();
    stimuli.push_back(stim);
    HypothesisAgent agent;
    Observation obs = observation_for(stimuli[0]);
    Choice last{};
    for (std::size_t i = 0; i < stimuli.size(); ++i) {
      obs.stimulus = stimuli[i];
      obs.trial_index = static_cast<int>(i);
      obs.history.clear();
      for (std::size_t h = 0; h < i; ++h) {
        const auto& e = req["history"][h];
        obs.history.push_back({Choice::from_optional(e["choice"].is_null() ? std::nullopt
                                                                           : std::optional<int>(e["choice"])),
                               e["correct"].get<bool>()});
      }
      last = agent.choose(obs);
    }
    return "my answer: " + std::to_string(last.key());
  });
  SessionConfig c;
  c.seed = 4;
  Session remote_session(c), local_session(c);
  RemoteAgent remote(RemoteEndpoint::parse(mock.url()));
  HypothesisAgent local;
  run_closed_loop(remote_session, remote);
  run_closed_loop(local_session, local);
  EXPECT_EQ(remote_session.trials(), local_session.trials());
}

TEST(MakeAgent, KindsAndErrors) {
  EXPECT_EQ(agent_kind_from_string("hypothesis"), AgentKind::HypothesisTesting);
  EXPECT_THROW(agent_kind_from_string("gpt"), ConfigError);
  Session s(SessionConfig{});
  AgentSpec spec;
  spec.kind = AgentKind::Remote;
  EXPECT_THROW(make_agent(spec, s), ConfigError);
  spec.kind = AgentKind::Scripted;
  spec.script = {Choice::key(1)};
  EXPECT_EQ(make_agent(spec, s)->name(), "scripted");
}
