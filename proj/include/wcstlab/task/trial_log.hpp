#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "wcstlab/task/session.hpp"

namespace wcst::task {

// Line-delimited JSON trial log: a header object followed by one object per
// completed trial.
class TrialLog {
 public:
  static constexpr std::string_view kFormat = "wcst-log";
  static constexpr int kVersion = 1;

  TrialLog() = default;
  TrialLog(std::string session_id, SessionConfig config, std::vector<TrialRecord> records)
      : session_id_(std::move(session_id)), config_(config), records_(std::move(records)) {}

  const std::string& session_id() const { return session_id_; }
  const SessionConfig& config() const { return config_; }
  const std::vector<TrialRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }

  std::string to_jsonl() const;
  // Throws ParseError with the offending line number.
  static TrialLog from_jsonl(std::string_view text, std::string_view source = "<log>");

  static TrialLog read_file(const std::string& path);
  void write_file(const std::string& path) const;

 private:
  std::string session_id_;
  SessionConfig config_;
  std::vector<TrialRecord> records_;
};

}  // namespace wcst::task
