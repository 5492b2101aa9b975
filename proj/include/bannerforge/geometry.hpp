#pragma once

/// @file geometry.hpp
/// Axis-aligned boxes in pixel space (origin top-left, y grows downward).

#include <algorithm>
#include <cmath>
#include <span>

namespace bannerforge {

/// [x_left, y_top, x_right, y_bottom]. Coordinates are real-valued so the
/// layout optimizer can move boxes continuously; annotation files carry
/// integers but nothing here depends on that.
struct BBox {
  double x_left = 0.0;
  double y_top = 0.0;
  double x_right = 0.0;
  double y_bottom = 0.0;

  [[nodiscard]] constexpr double width() const { return x_right - x_left; }
  [[nodiscard]] constexpr double height() const { return y_bottom - y_top; }
  [[nodiscard]] constexpr double area() const {
    return width() > 0.0 && height() > 0.0 ? width() * height() : 0.0;
  }
  [[nodiscard]] constexpr double center_x() const { return 0.5 * (x_left + x_right); }
  [[nodiscard]] constexpr double center_y() const { return 0.5 * (y_top + y_bottom); }

  /// Non-degenerate and non-negative.
  [[nodiscard]] constexpr bool valid() const {
    return x_left < x_right && y_top < y_bottom && x_left >= 0.0 && y_top >= 0.0;
  }

  [[nodiscard]] constexpr bool contains(const BBox& inner) const {
    return inner.x_left >= x_left && inner.y_top >= y_top && inner.x_right <= x_right &&
           inner.y_bottom <= y_bottom;
  }

  [[nodiscard]] constexpr BBox translated(double dx, double dy) const {
    return {x_left + dx, y_top + dy, x_right + dx, y_bottom + dy};
  }

  friend constexpr bool operator==(const BBox&, const BBox&) = default;
};

[[nodiscard]] constexpr double intersection_area(const BBox& a, const BBox& b) {
  const double w = std::min(a.x_right, b.x_right) - std::max(a.x_left, b.x_left);
  const double h = std::min(a.y_bottom, b.y_bottom) - std::max(a.y_top, b.y_top);
  return w > 0.0 && h > 0.0 ? w * h : 0.0;
}

/// Smallest box covering both.
[[nodiscard]] constexpr BBox hull(const BBox& a, const BBox& b) {
  return {std::min(a.x_left, b.x_left), std::min(a.y_top, b.y_top),
          std::max(a.x_right, b.x_right), std::max(a.y_bottom, b.y_bottom)};
}

/// Exact area of the union of a set of boxes (coordinate compression).
[[nodiscard]] double union_area(std::span<const BBox> boxes);

/// Integer pixel rectangle, half-open: columns [x0, x1), rows [y0, y1).
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  [[nodiscard]] constexpr int width() const { return x1 - x0; }
  [[nodiscard]] constexpr int height() const { return y1 - y0; }
  [[nodiscard]] constexpr bool empty() const { return x1 <= x0 || y1 <= y0; }
  [[nodiscard]] constexpr BBox to_bbox() const {
    return {static_cast<double>(x0), static_cast<double>(y0), static_cast<double>(x1),
            static_cast<double>(y1)};
  }
  friend constexpr bool operator==(const PixelRect&, const PixelRect&) = default;
};

/// Rounds each edge to the nearest pixel boundary.
[[nodiscard]] inline PixelRect to_pixel_rect(const BBox& b) {
  return {static_cast<int>(std::lround(b.x_left)), static_cast<int>(std::lround(b.y_top)),
          static_cast<int>(std::lround(b.x_right)), static_cast<int>(std::lround(b.y_bottom))};
}

}  // namespace bannerforge
