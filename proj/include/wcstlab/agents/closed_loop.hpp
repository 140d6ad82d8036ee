#pragma once

#include <string>
#include <vector>

#include "wcstlab/agents/agent.hpp"

namespace wcst::agents {

struct LoopResult {
  int trials = 0;
  int agent_errors = 0;  // remote failures recorded as timeouts
  std::vector<std::string> error_messages;
};

// Plays the session to completion: observe, choose, submit. Remote-agent
// failures are logged as Timeout trials and do not abort the session.
LoopResult run_closed_loop(task::Session& session, Agent& agent);

}  // namespace wcst::agents
