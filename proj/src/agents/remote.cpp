#include "wcstlab/agents/remote.hpp"

#include <cctype>
#include <cmath>

#include <fmt/format.h>
#include <httplib.h>

#include "wcstlab/agents/render.hpp"
#include "wcstlab/errors.hpp"

namespace wcst::agents {

namespace {

nlohmann::json card_json(const Card& c) {
  return nlohmann::json::array({c.color(), c.shape(), c.number(), c.border()});
}

std::optional<int> choice_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("choice")) return std::nullopt;
  const auto& c = j["choice"];
  if (c.is_number_integer()) {
    const auto v = c.get<long long>();
    if (v >= 1 && v <= 4) return static_cast<int>(v);
  } else if (c.is_number_float()) {
    const double v = c.get<double>();
    if (v == std::floor(v) && v >= 1 && v <= 4) return static_cast<int>(v);
  }
  return std::nullopt;
}

}  // namespace

RemoteEndpoint RemoteEndpoint::parse(std::string_view url) {
  RemoteEndpoint ep;
  auto rest = url;
  if (const auto p = rest.find("://"); p != std::string_view::npos) {
    ep.scheme = std::string(rest.substr(0, p));
    rest.remove_prefix(p + 3);
  }
  if (ep.scheme != "http") throw ConfigError(fmt::format("unsupported endpoint scheme in '{}'", url));
  const auto slash = rest.find('/');
  auto authority = rest.substr(0, slash);
  ep.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
  if (const auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    try {
      ep.port = std::stoi(std::string(authority.substr(colon + 1)));
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("bad port in endpoint '{}'", url));
    }
    authority = authority.substr(0, colon);
  }
  ep.host = std::string(authority);
  if (ep.host.empty()) throw ConfigError(fmt::format("endpoint '{}' has no host", url));
  return ep;
}

std::string RemoteEndpoint::base_url() const { return fmt::format("{}://{}:{}", scheme, host, port); }

nlohmann::json trial_payload(const Observation& obs) {
  nlohmann::json j;
  j["session_id"] = obs.session_id;
  j["trial_index"] = obs.trial_index;
  j["key_cards"] = nlohmann::json::array();
  for (const auto& k : obs.key_cards) j["key_cards"].push_back(card_json(k));
  j["stimulus"] = card_json(obs.stimulus);
  j["svg"] = render_trial_svg(obs.key_cards, obs.stimulus);
  j["history"] = nlohmann::json::array();
  for (const auto& h : obs.history) {
    j["history"].push_back({{"choice", h.choice.is_timeout() ? nlohmann::json(nullptr)
                                                             : nlohmann::json(h.choice.key())},
                            {"correct", h.correct}});
  }
  return j;
}

std::optional<int> extract_choice(std::string_view reply, bool strict) {
  const auto parsed = nlohmann::json::parse(reply, nullptr, /*allow_exceptions=*/false);
  if (!parsed.is_discarded()) {
    if (auto c = choice_from_json(parsed)) return c;
    if (strict) return std::nullopt;
    if (parsed.is_object() && parsed.contains("choice") && parsed["choice"].is_string()) {
      return extract_choice(parsed["choice"].get<std::string>(), false);
    }
  }
  if (strict) return std::nullopt;
  for (char ch : reply) {
    if (ch >= '1' && ch <= '4') return ch - '0';
  }
  return std::nullopt;
}

int remote_round_trip(const RemoteEndpoint& endpoint, const nlohmann::json& payload,
                      const RemoteOptions& options) {
  httplib::Client client(endpoint.host, endpoint.port);
  const auto secs = static_cast<time_t>(options.timeout_s);
  const auto usecs = static_cast<time_t>((options.timeout_s - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  auto res = client.Post(endpoint.path, payload.dump(), "application/json");
  if (!res) {
    throw RemoteAgentError(fmt::format("remote agent {}{} unreachable: {}", endpoint.base_url(),
                                       endpoint.path, httplib::to_string(res.error())));
  }
  if (res->status != 200) {
    throw RemoteAgentError(fmt::format("remote agent returned HTTP {}", res->status));
  }
  const auto choice = extract_choice(res->body, options.strict);
  if (!choice) {
    throw RemoteProtocolError(fmt::format("no choice 1-4 in remote reply: '{}'", res->body.substr(0, 120)));
  }
  return *choice;
}

Choice RemoteAgent::choose(const Observation& obs) {
  return Choice::key(remote_round_trip(endpoint_, trial_payload(obs), options_));
}

}  // namespace wcst::agents
