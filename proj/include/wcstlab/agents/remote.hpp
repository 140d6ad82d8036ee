#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "wcstlab/agents/agent.hpp"

namespace wcst::agents {

struct RemoteEndpoint {
  std::string scheme = "http";
  std::string host;
  int port = 80;
  std::string path = "/";

  // Accepts "http://host[:port][/path]".
  static RemoteEndpoint parse(std::string_view url);
  std::string base_url() const;
};

struct RemoteOptions {
  double timeout_s = 30.0;
  bool strict = false;
};

// Per-trial request body: structured cards, an SVG rendering and the full
// feedback history (the remote side is assumed stateless).
nlohmann::json trial_payload(const Observation& obs);

// Lenient mode: JSON {"choice": n}, else the first digit 1-4 in the text.
// Strict mode: only JSON {"choice": n} with n in 1-4.
std::optional<int> extract_choice(std::string_view reply, bool strict);

// One POST round trip. Throws RemoteAgentError on transport failure and
// RemoteProtocolError on an unusable reply.
int remote_round_trip(const RemoteEndpoint& endpoint, const nlohmann::json& payload,
                      const RemoteOptions& options = {});

class RemoteAgent final : public Agent {
 public:
  RemoteAgent(RemoteEndpoint endpoint, RemoteOptions options = {})
      : endpoint_(std::move(endpoint)), options_(options) {}
  Choice choose(const Observation& obs) override;
  std::string_view name() const override { return "remote"; }

 private:
  RemoteEndpoint endpoint_;
  RemoteOptions options_;
};

}  // namespace wcst::agents
