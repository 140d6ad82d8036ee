#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace wcst::task {

// The four sorting dimensions. The integer values are the log encoding.
enum class RuleDimension : std::uint8_t { Color = 0, Shape = 1, Number = 2, BorderColor = 3 };

inline constexpr int kNumDimensions = 4;
inline constexpr int kNumKeys = 4;
inline constexpr int kNumStimuli = 24;  // 4! attribute permutations

inline constexpr std::array<RuleDimension, kNumDimensions> kAllRules{
    RuleDimension::Color, RuleDimension::Shape, RuleDimension::Number, RuleDimension::BorderColor};

constexpr int to_index(RuleDimension rule) { return static_cast<int>(rule); }
std::optional<RuleDimension> rule_from_index(int index);
std::string_view to_string(RuleDimension rule);

struct Card {
  // Attribute index (0-3) per dimension, indexed by RuleDimension.
  std::array<std::uint8_t, kNumDimensions> attributes{};

  constexpr int attribute(RuleDimension rule) const { return attributes[to_index(rule)]; }
  constexpr int color() const { return attribute(RuleDimension::Color); }
  constexpr int shape() const { return attribute(RuleDimension::Shape); }
  constexpr int number() const { return attribute(RuleDimension::Number); }
  constexpr int border() const { return attribute(RuleDimension::BorderColor); }

  bool valid() const;
  bool is_permutation() const;

  friend bool operator==(const Card&, const Card&) = default;
};

// Key card k carries attribute index k on every dimension.
const std::array<Card, kNumKeys>& key_cards();

// 0-based key indicated by `rule` for `stimulus`.
constexpr int indicated_key(const Card& stimulus, RuleDimension rule) {
  return stimulus.attribute(rule);
}

// Lexicographic permutation index <-> stimulus card (0..23).
Card stimulus_from_index(int index);
int stimulus_index(const Card& stimulus);

// A response: a 1-based key or a timeout.
class Choice {
 public:
  constexpr Choice() = default;

  static constexpr Choice timeout() { return Choice{}; }
  // Throws InputError for keys outside 1-4.
  static Choice key(int one_based);
  static Choice from_optional(std::optional<int> one_based);

  constexpr bool is_timeout() const { return key_ == 0; }
  constexpr int key() const { return key_; }
  constexpr int key_index() const { return key_ - 1; }
  std::optional<int> to_optional() const;

  friend bool operator==(const Choice&, const Choice&) = default;

 private:
  explicit constexpr Choice(int k) : key_(k) {}
  int key_ = 0;
};

}  // namespace wcst::task
