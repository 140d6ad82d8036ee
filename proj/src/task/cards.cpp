#include "wcstlab/task/cards.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "wcstlab/errors.hpp"

namespace wcst::task {

std::optional<RuleDimension> rule_from_index(int index) {
  if (index < 0 || index >= kNumDimensions) return std::nullopt;
  return static_cast<RuleDimension>(index);
}

std::string_view to_string(RuleDimension rule) {
  switch (rule) {
    case RuleDimension::Color:
      return "color";
    case RuleDimension::Shape:
      return "shape";
    case RuleDimension::Number:
      return "number";
    case RuleDimension::BorderColor:
      return "border_color";
  }
  return "unknown";
}

bool Card::valid() const {
  return std::all_of(attributes.begin(), attributes.end(), [](auto a) { return a < kNumKeys; });
}

bool Card::is_permutation() const {
  if (!valid()) return false;
  std::array<bool, kNumKeys> seen{};
  for (auto a : attributes) {
    if (seen[a]) return false;
    seen[a] = true;
  }
  return true;
}

const std::array<Card, kNumKeys>& key_cards() {
  static const std::array<Card, kNumKeys> keys = [] {
    std::array<Card, kNumKeys> out{};
    for (int k = 0; k < kNumKeys; ++k) {
      auto v = static_cast<std::uint8_t>(k);
      out[k].attributes = {v, v, v, v};
    }
    return out;
  }();
  return keys;
}

Card stimulus_from_index(int index) {
  if (index < 0 || index >= kNumStimuli) {
    throw InputError("stimulus index out of range: " + std::to_string(index));
  }
  std::vector<std::uint8_t> pool{0, 1, 2, 3};
  Card card;
  int radix = 6;  // 3!
  for (int pos = 0; pos < kNumDimensions; ++pos) {
    const int digit = radix > 0 ? index / radix : 0;
    if (radix > 0) index %= radix;
    card.attributes[pos] = pool[digit];
    pool.erase(pool.begin() + digit);
    radix = (kNumDimensions - pos - 1) > 1 ? radix / (kNumDimensions - pos - 1) : 0;
  }
  return card;
}

int stimulus_index(const Card& stimulus) {
  if (!stimulus.is_permutation()) {
    throw InputError("stimulus is not an attribute permutation");
  }
  std::vector<std::uint8_t> pool{0, 1, 2, 3};
  int index = 0;
  int radix = 6;
  for (int pos = 0; pos < kNumDimensions; ++pos) {
    const auto it = std::find(pool.begin(), pool.end(), stimulus.attributes[pos]);
    index += static_cast<int>(it - pool.begin()) * radix;
    pool.erase(it);
    radix = (kNumDimensions - pos - 1) > 1 ? radix / (kNumDimensions - pos - 1) : 0;
  }
  return index;
}

Choice Choice::key(int one_based) {
  if (one_based < 1 || one_based > kNumKeys) {
    throw InputError("choice must be a key index 1-4, got " + std::to_string(one_based));
  }
  return Choice{one_based};
}

Choice Choice::from_optional(std::optional<int> one_based) {
  return one_based ? key(*one_based) : timeout();
}

std::optional<int> Choice::to_optional() const {
  if (is_timeout()) return std::nullopt;
  return key_;
}

}  // namespace wcst::task
