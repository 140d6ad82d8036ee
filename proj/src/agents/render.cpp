#include "wcstlab/agents/render.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace wcst::agents {

namespace {

constexpr double kCardWidth = 120.0;
constexpr double kCardHeight = 170.0;
constexpr double kGap = 24.0;

std::string shape_svg(int shape, double cx, double cy, double r, std::string_view fill) {
  switch (shape) {
    case 0:  // triangle
      return fmt::format(R"(<polygon points="{:.1f},{:.1f} {:.1f},{:.1f} {:.1f},{:.1f}" fill="{}"/>)",
                         cx, cy - r, cx + r, cy + r * 0.8, cx - r, cy + r * 0.8, fill);
    case 1: {  // star
      std::string pts;
      for (int i = 0; i < 10; ++i) {
        const double rad = (i % 2 == 0) ? r : r * 0.45;
        const double a = -std::numbers::pi / 2 + i * std::numbers::pi / 5;
        pts += fmt::format("{}{:.1f},{:.1f}", i ? " " : "", cx + rad * std::cos(a), cy + rad * std::sin(a));
      }
      return fmt::format(R"(<polygon points="{}" fill="{}"/>)", pts, fill);
    }
    case 2: {  // cross
      const double t = r * 0.35;
      return fmt::format(
          R"(<polygon points="{0:.1f},{2:.1f} {1:.1f},{2:.1f} {1:.1f},{4:.1f} {6:.1f},{4:.1f} {6:.1f},{5:.1f} {1:.1f},{5:.1f} {1:.1f},{3:.1f} {0:.1f},{3:.1f} {0:.1f},{5:.1f} {7:.1f},{5:.1f} {7:.1f},{4:.1f} {0:.1f},{4:.1f}" fill="{8}"/>)",
          cx - t, cx + t, cy - r, cy + r, cy - t, cy + t, cx + r, cx - r, fill);
    }
    default:  // circle
      return fmt::format(R"(<circle cx="{:.1f}" cy="{:.1f}" r="{:.1f}" fill="{}"/>)", cx, cy, r * 0.85, fill);
  }
}

}  // namespace

const CardAssets& card_assets() {
  static const CardAssets assets{
      {"#D55E00", "#0072B2", "#009E73", "#E69F00"},
      {"triangle", "star", "cross", "circle"},
      {"#000000", "#CC79A7", "#56B4E9", "#F0E442"},
  };
  return assets;
}

std::string render_card_svg(const task::Card& card, double x, double y) {
  const auto& a = card_assets();
  if (!card.valid()) {
    return fmt::format(
        R"(<g class="card error"><rect x="{:.1f}" y="{:.1f}" width="{}" height="{}" fill="#ffffff" stroke="#ff0000"/></g>)",
        x, y, kCardWidth, kCardHeight);
  }
  std::string out = fmt::format(
      R"(<g class="card"><rect x="{:.1f}" y="{:.1f}" width="{}" height="{}" rx="8" fill="#ffffff" stroke="{}" stroke-width="8"/>)",
      x, y, kCardWidth, kCardHeight, a.border_colors[card.border()]);
  const int copies = card.number() + 1;
  const double r = 14.0;
  const double step = kCardHeight / (copies + 1);
  for (int i = 0; i < copies; ++i) {
    out += shape_svg(card.shape(), x + kCardWidth / 2, y + step * (i + 1), r, a.colors[card.color()]);
  }
  out += "</g>";
  return out;
}

std::string render_trial_svg(const std::array<task::Card, task::kNumKeys>& keys,
                             const task::Card& stimulus) {
  const double width = 4 * kCardWidth + 5 * kGap;
  const double height = 2 * kCardHeight + 3 * kGap + 40;
  std::string out = fmt::format(
      R"(<svg xmlns="http://www.w3.org/2000/svg" width="{0:.0f}" height="{1:.0f}" viewBox="0 0 {0:.0f} {1:.0f}"><rect width="100%" height="100%" fill="#808080"/>)",
      width, height);
  for (int k = 0; k < task::kNumKeys; ++k) {
    const double x = kGap + k * (kCardWidth + kGap);
    out += render_card_svg(keys[k], x, kGap);
    out += fmt::format(R"(<text x="{:.1f}" y="{:.1f}" font-size="20" text-anchor="middle" fill="#ffffff">{}</text>)",
                       x + kCardWidth / 2, kGap + kCardHeight + 26, k + 1);
  }
  out += render_card_svg(stimulus, (width - kCardWidth) / 2, 2 * kGap + kCardHeight + 40);
  out += "</svg>";
  return out;
}

}  // namespace wcst::agents
