#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "wcstlab/task/session.hpp"

namespace wcst::service {

// Monotonic seconds.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now() const = 0;
};

class SteadyClock final : public Clock {
 public:
  double now() const override;

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Test clock moved by hand.
class ManualClock final : public Clock {
 public:
  double now() const override { return t_.load(); }
  void set(double t) { t_.store(t); }
  void advance(double dt) { t_.store(t_.load() + dt); }

 private:
  std::atomic<double> t_{0.0};
};

struct ServiceConfig {
  task::SessionConfig defaults;  // seed is ignored
  std::uint64_t base_seed = 0;   // sessions created without a seed derive theirs from it
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// Transport-independent session endpoints. Each session is guarded by its own
// mutex; distinct sessions proceed in parallel. The response window is timed
// on the service clock from the scheduled stimulus onset, so a late choice is
// recorded as a timeout whatever the client reports.
class SessionService {
 public:
  SessionService(ServiceConfig config, std::shared_ptr<const Clock> clock);

  Response create_session(std::string_view body);                       // POST /sessions
  Response get_trial(std::string_view id);                              // GET /sessions/{id}/trial
  Response post_choice(std::string_view id, std::string_view body);     // POST /sessions/{id}/choice
  Response get_log(std::string_view id);                                // GET /sessions/{id}/log
  Response render_svg(std::string_view id);                             // GET /sessions/{id}/render.svg

  std::vector<std::string> session_ids() const;

 private:
  struct Entry {
    std::mutex mutex;
    task::Session session;
    double created_at = 0.0;

    Entry(task::SessionConfig cfg, std::string id, double t) : session(cfg, std::move(id)), created_at(t) {}
  };

  std::shared_ptr<Entry> find(std::string_view id) const;

  ServiceConfig config_;
  std::shared_ptr<const Clock> clock_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>, std::less<>> sessions_;
  std::uint64_t counter_ = 0;
};

}  // namespace wcst::service
