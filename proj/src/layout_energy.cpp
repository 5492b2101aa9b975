#include "bannerforge/layout_energy.hpp"

#include <cmath>

#include "json_util.hpp"

namespace bannerforge {

namespace {

// Slack for boxes produced by floating-point clamping.
constexpr double kEps = 1e-9;

bool counted_pair(const ElementBox& a, const ElementBox& b) { return a.movable || b.movable; }

const BBox& distance_anchor(const ElementBox& e) {
  return e.kind == ElementKind::person && e.focus ? *e.focus : e.box;
}

}  // namespace

std::string_view to_string(ElementKind k) {
  switch (k) {
    case ElementKind::logo: return "logo";
    case ElementKind::text: return "text";
    case ElementKind::person: return "person";
    case ElementKind::object: return "object";
  }
  return "object";
}

std::optional<ElementKind> parse_element_kind(std::string_view s) {
  if (s == "logo") return ElementKind::logo;
  if (s == "text") return ElementKind::text;
  if (s == "person") return ElementKind::person;
  if (s == "object") return ElementKind::object;
  return std::nullopt;
}

std::size_t Layout::movable_count() const {
  return static_cast<std::size_t>(
      std::count_if(elements.begin(), elements.end(), [](const auto& e) { return e.movable; }));
}

double Layout::diagonal() const { return std::hypot(canvas_width, canvas_height); }

Layout Layout::mirrored() const {
  Layout out = *this;
  const double w = canvas_width;
  auto flip = [w](BBox& b) {
    const double l = b.x_left;
    b.x_left = w - b.x_right;
    b.x_right = w - l;
  };
  for (auto& e : out.elements) {
    flip(e.box);
    if (e.focus) flip(*e.focus);
  }
  return out;
}

bool EnergyWeights::valid() const {
  const double ws[] = {w_align, w_overlap, w_dist, w_sym};
  bool any_positive = false;
  for (double w : ws) {
    if (!std::isfinite(w) || w < 0.0) return false;
    any_positive = any_positive || w > 0.0;
  }
  return any_positive;
}

EnergyWeights parse_weights(std::string_view json_text) {
  const auto doc = detail::parse_json(json_text, "weights");
  EnergyWeights w;
  w.w_align = detail::as_number(detail::require(doc, "w_align", ""), "w_align");
  w.w_overlap = detail::as_number(detail::require(doc, "w_overlap", ""), "w_overlap");
  w.w_dist = detail::as_number(detail::require(doc, "w_dist", ""), "w_dist");
  w.w_sym = detail::as_number(detail::require(doc, "w_sym", ""), "w_sym");
  if (!w.valid()) throw DataError("weights", "weights must be finite, non-negative, and not all zero");
  return w;
}

std::string serialize_weights(const EnergyWeights& w) {
  const detail::json doc = {
      {"w_align", w.w_align}, {"w_overlap", w.w_overlap}, {"w_dist", w.w_dist}, {"w_sym", w.w_sym}};
  return doc.dump(2);
}

bool KindBounds::admits(double w, double h) const {
  return w >= min_w - kEps && w <= max_w + kEps && h >= min_h - kEps && h <= max_h + kEps;
}

const KindBounds& SizeBounds::for_kind(ElementKind k) const { return k == ElementKind::logo ? logo : text; }

bool SizeBounds::valid(int canvas_width, int canvas_height) const {
  for (const KindBounds* b : {&logo, &text}) {
    if (!(b->min_w > 0 && b->min_w <= b->max_w && b->max_w <= canvas_width)) return false;
    if (!(b->min_h > 0 && b->min_h <= b->max_h && b->max_h <= canvas_height)) return false;
  }
  return true;
}

double overlap_fraction(const BBox& a, const BBox& b) {
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double overlap_energy(const Layout& layout) {
  const auto& els = layout.elements;
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < els.size(); ++i) {
    for (std::size_t j = i + 1; j < els.size(); ++j) {
      if (!counted_pair(els[i], els[j])) continue;
      sum += overlap_fraction(els[i].box, els[j].box);
      ++pairs;
    }
  }
  return pairs == 0 ? 0.0 : sum / static_cast<double>(pairs);
}

double center_distance(const BBox& a, const BBox& b) {
  return std::hypot(a.center_x() - b.center_x(), a.center_y() - b.center_y());
}

double distance_energy(const Layout& layout) {
  const auto& els = layout.elements;
  const double d_ref = 0.25 * layout.diagonal();
  if (d_ref <= 0.0) return 0.0;
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < els.size(); ++i) {
    for (std::size_t j = i + 1; j < els.size(); ++j) {
      if (!counted_pair(els[i], els[j])) continue;
      const double d = center_distance(distance_anchor(els[i]), distance_anchor(els[j]));
      sum += std::max(0.0, 1.0 - d / d_ref);
      ++pairs;
    }
  }
  return pairs == 0 ? 0.0 : sum / static_cast<double>(pairs);
}

double horizontal_asymmetry(const BBox& box, double layout_width) {
  const double x_center = (box.x_left + box.x_right) / 2.0;
  return std::abs(2.0 * x_center - layout_width);
}

double symmetry_energy(const Layout& layout) {
  if (layout.canvas_width <= 0) return 0.0;
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& e : layout.elements) {
    if (!e.movable) continue;
    sum += horizontal_asymmetry(e.box, layout.canvas_width) / layout.canvas_width;
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double misalignment_energy(const Layout& layout) {
  if (layout.canvas_width <= 0) return 0.0;
  const double w = layout.canvas_width;
  double sum = 0.0;
  std::size_t pairs = 0;
  const auto& els = layout.elements;
  for (std::size_t i = 0; i < els.size(); ++i) {
    if (!els[i].movable) continue;
    for (std::size_t j = i + 1; j < els.size(); ++j) {
      if (!els[j].movable) continue;
      const BBox& a = els[i].box;
      const BBox& b = els[j].box;
      const double left = 0.5 * std::abs(a.x_left - b.x_left) / w;
      const double center = std::abs(a.center_x() - b.center_x()) / w;
      const double right = std::abs(a.x_right - b.x_right) / w;
      sum += std::min({left, center, right});
      ++pairs;
    }
  }
  return pairs == 0 ? 0.0 : std::clamp(sum / static_cast<double>(pairs), 0.0, 1.0);
}

bool feasible(const Layout& layout, const SizeBounds& bounds) {
  for (const auto& e : layout.elements) {
    if (!e.movable) continue;
    const BBox& b = e.box;
    if (b.x_left < -kEps || b.y_top < -kEps || b.x_right > layout.canvas_width + kEps ||
        b.y_bottom > layout.canvas_height + kEps) {
      return false;
    }
    if (!bounds.for_kind(e.kind).admits(b.width(), b.height())) return false;
  }
  return true;
}

EnergyBreakdown total_energy(const Layout& layout, const EnergyWeights& w, const SizeBounds& bounds) {
  EnergyBreakdown out;
  out.e_align = misalignment_energy(layout);
  out.e_overlap = overlap_energy(layout);
  out.e_dist = distance_energy(layout);
  out.e_sym = symmetry_energy(layout);
  out.total = w.w_align * out.e_align + w.w_overlap * out.e_overlap + w.w_dist * out.e_dist +
              w.w_sym * out.e_sym;
  out.feasible = feasible(layout, bounds);
  return out;
}

}  // namespace bannerforge
