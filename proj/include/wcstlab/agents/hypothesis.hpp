#pragma once

#include <array>
#include <cstdint>

#include "wcstlab/agents/agent.hpp"

namespace wcst::agents {

// Subset of the four rule dimensions.
class RuleSet {
 public:
  constexpr RuleSet() = default;
  static constexpr RuleSet all() { return RuleSet(0b1111); }
  static constexpr RuleSet only(RuleDimension r) { return RuleSet(bit(r)); }

  constexpr bool contains(RuleDimension r) const { return (bits_ & bit(r)) != 0; }
  constexpr void insert(RuleDimension r) { bits_ |= bit(r); }
  constexpr void erase(RuleDimension r) { bits_ &= static_cast<std::uint8_t>(~bit(r)); }
  constexpr bool empty() const { return bits_ == 0; }
  int size() const;
  constexpr bool subset_of(RuleSet other) const { return (bits_ & ~other.bits_) == 0; }

  friend constexpr bool operator==(RuleSet, RuleSet) = default;

 private:
  explicit constexpr RuleSet(std::uint8_t bits) : bits_(bits) {}
  static constexpr std::uint8_t bit(RuleDimension r) {
    return static_cast<std::uint8_t>(1u << task::to_index(r));
  }
  std::uint8_t bits_ = 0;
};

// Belief update after feedback on `chosen_key` (0-based) for `stimulus`.
// Correct keeps the rules that indicate the key; incorrect removes them; an
// empty result resets to every rule that does not indicate the key.
RuleSet hypothesis_update(RuleSet beliefs, int chosen_key, bool correct, const Card& stimulus);

using TryOrder = std::array<RuleDimension, task::kNumDimensions>;
inline constexpr TryOrder kDefaultTryOrder = task::kAllRules;

// Sorts by the first surviving hypothesis in a fixed try order. With
// `lapse_rate` > 0 it occasionally presses a random key instead.
class HypothesisAgent final : public Agent {
 public:
  explicit HypothesisAgent(TryOrder order = kDefaultTryOrder, double lapse_rate = 0.0,
                           std::uint64_t seed = 0);
  Choice choose(const Observation& obs) override;
  std::string_view name() const override { return "hypothesis"; }

  RuleSet beliefs() const { return beliefs_; }

 private:
  void absorb_feedback(const Observation& obs);

  TryOrder order_;
  double lapse_rate_;
  Rng rng_;
  RuleSet beliefs_ = RuleSet::all();
  std::size_t seen_ = 0;
  Card last_stimulus_{};
  int last_key_ = -1;
};

// Finds a first rule like the hypothesis tester, then keeps sorting by it no
// matter what feedback follows.
class PerseverativeAgent final : public Agent {
 public:
  Choice choose(const Observation& obs) override;
  std::string_view name() const override { return "perseverative"; }

 private:
  RuleSet beliefs_ = RuleSet::all();
  std::optional<RuleDimension> locked_;
  std::size_t seen_ = 0;
  int last_key_ = -1;
  Card last_stimulus_{};
  RuleDimension last_rule_ = RuleDimension::Color;
};

}  // namespace wcst::agents
