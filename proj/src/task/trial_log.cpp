#include "wcstlab/task/trial_log.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wcstlab/errors.hpp"

namespace wcst::task {

namespace {

using ojson = nlohmann::ordered_json;

ojson config_to_json(const SessionConfig& c) {
  ojson j;
  j["seed"] = c.seed;
  j["n_blocks"] = c.n_blocks;
  j["switch_streak"] = c.switch_streak;
  j["response_window"] = c.response_window;
  j["max_trials"] = c.max_trials;
  j["fixation_duration"] = c.fixation_duration;
  j["feedback_duration"] = c.feedback_duration;
  return j;
}

SessionConfig config_from_json(const ojson& j) {
  SessionConfig c;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.n_blocks = j.at("n_blocks").get<int>();
  c.switch_streak = j.at("switch_streak").get<int>();
  c.response_window = j.at("response_window").get<double>();
  c.max_trials = j.at("max_trials").get<int>();
  c.fixation_duration = j.at("fixation_duration").get<double>();
  c.feedback_duration = j.at("feedback_duration").get<double>();
  return c;
}

ojson card_to_json(const Card& card) {
  return ojson::array({card.color(), card.shape(), card.number(), card.border()});
}

Card card_from_json(const ojson& j) {
  if (!j.is_array() || j.size() != 4) throw InputError("stimulus must be an array of 4 indices");
  Card c;
  for (int d = 0; d < kNumDimensions; ++d) {
    const int v = j[d].get<int>();
    if (v < 0 || v >= kNumKeys) throw InputError("stimulus attribute out of range");
    c.attributes[d] = static_cast<std::uint8_t>(v);
  }
  return c;
}

ojson optional_number(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

}  // namespace

std::string TrialLog::to_jsonl() const {
  std::string out;
  ojson header;
  header["format"] = kFormat;
  header["version"] = kVersion;
  header["session_id"] = session_id_;
  header["config"] = config_to_json(config_);
  out += header.dump();
  out += '\n';
  for (const auto& r : records_) {
    ojson j;
    j["session_id"] = session_id_;
    j["trial_index"] = r.spec.trial_index;
    j["block_index"] = r.spec.block_index;
    j["rule"] = to_index(r.spec.active_rule);
    j["stimulus"] = card_to_json(r.spec.stimulus);
    j["choice"] = r.choice.is_timeout() ? ojson(nullptr) : ojson(r.choice.key());
    j["correct"] = r.correct;
    j["rt_s"] = optional_number(r.rt);
    j["t_fixation"] = r.times.fixation_on;
    j["t_keys"] = r.times.keys_on;
    j["t_stimulus"] = r.times.stimulus_on;
    j["t_response"] = r.times.response;
    j["t_feedback"] = r.times.feedback_on;
    out += j.dump();
    out += '\n';
  }
  return out;
}

TrialLog TrialLog::from_jsonl(std::string_view text, std::string_view source) {
  const std::string src(source);
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  bool have_header = false;
  TrialLog log;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = ojson::parse(line);
      if (!have_header) {
        if (j.value("format", "") != kFormat) throw InputError("missing wcst-log header");
        if (j.at("version").get<int>() != kVersion) throw InputError("unsupported log version");
        log.session_id_ = j.value("session_id", "");
        log.config_ = config_from_json(j.at("config"));
        have_header = true;
        continue;
      }
      TrialRecord r;
      r.spec.key_cards = key_cards();
      r.spec.trial_index = j.at("trial_index").get<int>();
      r.spec.block_index = j.at("block_index").get<int>();
      const auto rule = rule_from_index(j.at("rule").get<int>());
      if (!rule) throw InputError("rule out of range");
      r.spec.active_rule = *rule;
      r.spec.stimulus = card_from_json(j.at("stimulus"));
      const auto& choice = j.at("choice");
      r.choice = choice.is_null() ? Choice::timeout() : Choice::key(choice.get<int>());
      r.correct = j.at("correct").get<bool>();
      const auto& rt = j.at("rt_s");
      if (!rt.is_null()) r.rt = rt.get<double>();
      r.times.fixation_on = j.at("t_fixation").get<double>();
      r.times.keys_on = j.at("t_keys").get<double>();
      r.times.stimulus_on = j.at("t_stimulus").get<double>();
      r.times.response = j.at("t_response").get<double>();
      r.times.feedback_on = j.at("t_feedback").get<double>();
      if (r.spec.trial_index != static_cast<int>(log.records_.size())) {
        throw InputError("trial_index is not consecutive");
      }
      log.records_.push_back(r);
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(src, have_header ? "trial" : "header", line_no, e.what());
    }
  }
  if (!have_header) throw ParseError(src, "header", line_no, "empty log (no header line)");
  return log;
}

TrialLog TrialLog::read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open trial log: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_jsonl(ss.str(), path);
}

void TrialLog::write_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write trial log: " + path);
  out << to_jsonl();
}

}  // namespace wcst::task
