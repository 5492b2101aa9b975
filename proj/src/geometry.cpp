#include "bannerforge/geometry.hpp"

#include <vector>

namespace bannerforge {

double union_area(std::span<const BBox> boxes) {
  std::vector<double> xs;
  xs.reserve(boxes.size() * 2);
  for (const auto& b : boxes) {
    if (b.area() <= 0.0) continue;
    xs.push_back(b.x_left);
    xs.push_back(b.x_right);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  double total = 0.0;
  std::vector<std::pair<double, double>> spans;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double lo = xs[i];
    const double hi = xs[i + 1];
    spans.clear();
    for (const auto& b : boxes) {
      if (b.area() > 0.0 && b.x_left <= lo && b.x_right >= hi) spans.emplace_back(b.y_top, b.y_bottom);
    }
    if (spans.empty()) continue;
    std::sort(spans.begin(), spans.end());
    double covered = 0.0;
    double cur_lo = spans.front().first;
    double cur_hi = spans.front().second;
    for (const auto& [top, bottom] : spans) {
      if (top > cur_hi) {
        covered += cur_hi - cur_lo;
        cur_lo = top;
        cur_hi = bottom;
      } else {
        cur_hi = std::max(cur_hi, bottom);
      }
    }
    covered += cur_hi - cur_lo;
    total += covered * (hi - lo);
  }
  return total;
}

}  // namespace bannerforge
