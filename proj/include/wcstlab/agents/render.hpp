#pragma once

#include <array>
#include <string>
#include <string_view>

#include "wcstlab/task/cards.hpp"

namespace wcst::agents {

// Fixed asset table shared with the browser client. Colours are from the
// Okabe-Ito palette.
struct CardAssets {
  std::array<std::string_view, 4> colors;
  std::array<std::string_view, 4> shapes;
  std::array<std::string_view, 4> border_colors;
};

const CardAssets& card_assets();

// SVG group for one card with its top-left corner at (x, y).
std::string render_card_svg(const task::Card& card, double x, double y);

// Single image: a row of four labelled key cards above a centred stimulus.
std::string render_trial_svg(const std::array<task::Card, task::kNumKeys>& keys,
                             const task::Card& stimulus);

}  // namespace wcst::agents
