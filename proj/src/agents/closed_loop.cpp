#include "wcstlab/agents/closed_loop.hpp"

#include "wcstlab/errors.hpp"

namespace wcst::agents {

LoopResult run_closed_loop(task::Session& session, Agent& agent) {
  LoopResult result;
  while (!session.finished()) {
    session.next_trial();
    const auto obs = observe(session);
    Choice choice = Choice::timeout();
    try {
      choice = agent.choose(obs);
    } catch (const RemoteAgentError& e) {
      ++result.agent_errors;
      result.error_messages.emplace_back(e.what());
    }
    session.submit_choice(choice, choice.is_timeout() ? std::nullopt
                                                      : std::optional<double>(agent.response_time()));
    ++result.trials;
  }
  return result;
}

}  // namespace wcst::agents
