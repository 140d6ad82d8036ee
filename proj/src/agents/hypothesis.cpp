#include "wcstlab/agents/hypothesis.hpp"


namespace wcst::agents {

int RuleSet::size() const {
  int n = 0;
  for (auto r : task::kAllRules) n += contains(r) ? 1 : 0;
  return n;
}

RuleSet hypothesis_update(RuleSet beliefs, int chosen_key, bool correct, const Card& stimulus) {
  RuleSet indicating;
  for (auto r : task::kAllRules) {
    if (task::indicated_key(stimulus, r) == chosen_key) indicating.insert(r);
  }
  RuleSet next;
  for (auto r : task::kAllRules) {
    if (!beliefs.contains(r)) continue;
    if (indicating.contains(r) == correct) next.insert(r);
  }
  if (next.empty()) {
    for (auto r : task::kAllRules) {
      if (!indicating.contains(r)) next.insert(r);
    }
  }
  return next;
}

namespace {

RuleDimension first_in(RuleSet beliefs, const TryOrder& order) {
  for (auto r : order) {
    if (beliefs.contains(r)) return r;
  }
  return order.front();
}

}  // namespace

HypothesisAgent::HypothesisAgent(TryOrder order, double lapse_rate, std::uint64_t seed)
    : order_(order), lapse_rate_(lapse_rate), rng_(seed) {}

void HypothesisAgent::absorb_feedback(const Observation& obs) {
  if (obs.history.size() < seen_) {  // new session
    beliefs_ = RuleSet::all();
    seen_ = 0;
    last_key_ = -1;
  }
  if (last_key_ >= 0 && obs.history.size() > seen_) {
    const auto& fb = obs.history.back();
    if (!fb.choice.is_timeout()) {
      beliefs_ = hypothesis_update(beliefs_, fb.choice.key_index(), fb.correct, last_stimulus_);
    }
  }
  seen_ = obs.history.size();
}

Choice HypothesisAgent::choose(const Observation& obs) {
  absorb_feedback(obs);
  int key = task::indicated_key(obs.stimulus, first_in(beliefs_, order_));
  if (lapse_rate_ > 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < lapse_rate_) {
    key = uniform_index(rng_, task::kNumKeys);
  }
  last_stimulus_ = obs.stimulus;
  last_key_ = key;
  return Choice::key(key + 1);
}

Choice PerseverativeAgent::choose(const Observation& obs) {
  if (last_key_ >= 0 && obs.history.size() > seen_ && !locked_) {
    const auto& fb = obs.history.back();
    if (fb.correct) {
      locked_ = last_rule_;
    } else {
      beliefs_ = hypothesis_update(beliefs_, last_key_, false, last_stimulus_);
    }
  }
  seen_ = obs.history.size();
  last_rule_ = locked_ ? *locked_ : first_in(beliefs_, kDefaultTryOrder);
  last_key_ = task::indicated_key(obs.stimulus, last_rule_);
  last_stimulus_ = obs.stimulus;
  return Choice::key(last_key_ + 1);
}

}  // namespace wcst::agents
