#pragma once

/// @file layout_energy.hpp
/// Layout representation and the aesthetic energy terms combined into the
/// weighted total E = w_align*E_align + w_overlap*E_overlap + w_dist*E_dist + w_sym*E_sym.
///
/// Lower energy is better. Every term is normalized to [0, 1] so the weights
/// carry the relative importance. The optimizer's fitness is -total.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bannerforge/geometry.hpp"

namespace bannerforge {

enum class ElementKind { logo, text, person, object };

std::string_view to_string(ElementKind k);
std::optional<ElementKind> parse_element_kind(std::string_view s);

/// Logos and text are placed by the optimizer; persons and objects come from
/// the photo and stay fixed.
[[nodiscard]] constexpr bool is_movable_kind(ElementKind k) {
  return k == ElementKind::logo || k == ElementKind::text;
}

struct ElementBox {
  ElementKind kind = ElementKind::logo;
  BBox box;
  bool movable = true;
  /// For a person: the face box. Distance penalties measure from here,
  /// since crowding the face is what hurts.
  std::optional<BBox> focus;

  friend bool operator==(const ElementBox&, const ElementBox&) = default;
};

struct Layout {
  int canvas_width = 0;
  int canvas_height = 0;
  std::vector<ElementBox> elements;

  [[nodiscard]] std::size_t movable_count() const;
  [[nodiscard]] double diagonal() const;
  /// Reflects every element about the vertical center line.
  [[nodiscard]] Layout mirrored() const;

  friend bool operator==(const Layout&, const Layout&) = default;
};

struct EnergyWeights {
  double w_align = 1.0;
  double w_overlap = 4.0;
  double w_dist = 1.0;
  double w_sym = 1.0;

  /// All non-negative and finite, at least one positive.
  [[nodiscard]] bool valid() const;
  friend bool operator==(const EnergyWeights&, const EnergyWeights&) = default;
};

[[nodiscard]] EnergyWeights parse_weights(std::string_view json_text);
[[nodiscard]] std::string serialize_weights(const EnergyWeights& w);

/// Allowed width/height range for one element kind, in pixels.
struct KindBounds {
  double min_w = 1.0;
  double max_w = 1.0;
  double min_h = 1.0;
  double max_h = 1.0;

  [[nodiscard]] bool admits(double w, double h) const;
  friend bool operator==(const KindBounds&, const KindBounds&) = default;
};

struct SizeBounds {
  KindBounds logo;
  KindBounds text;

  [[nodiscard]] const KindBounds& for_kind(ElementKind k) const;
  /// 0 < min <= max <= canvas dimension for both kinds.
  [[nodiscard]] bool valid(int canvas_width, int canvas_height) const;
  friend bool operator==(const SizeBounds&, const SizeBounds&) = default;
};

struct EnergyBreakdown {
  double e_align = 0.0;
  double e_overlap = 0.0;
  double e_dist = 0.0;
  double e_sym = 0.0;
  double total = 0.0;
  bool feasible = true;
};

/// Intersection over union; 0 for disjoint boxes, 1 for identical ones.
[[nodiscard]] double overlap_fraction(const BBox& a, const BBox& b);

/// Mean overlap_fraction over element pairs that involve at least one
/// movable element.
[[nodiscard]] double overlap_energy(const Layout& layout);

[[nodiscard]] double center_distance(const BBox& a, const BBox& b);

/// Closeness penalty: mean over counted pairs of max(0, 1 - d / d_ref),
/// d_ref = 0.25 * canvas diagonal.
[[nodiscard]] double distance_energy(const Layout& layout);

/// |2 * x_center - layout_width|
[[nodiscard]] double horizontal_asymmetry(const BBox& box, double layout_width);

/// Mean horizontal asymmetry of movable elements over layout width.
[[nodiscard]] double symmetry_energy(const Layout& layout);

/// For each movable pair, the cheapest of left-edge (half weight), center and
/// right-edge horizontal offsets, over canvas width; averaged and clamped to
/// [0, 1].
[[nodiscard]] double misalignment_energy(const Layout& layout);

/// Every movable element on canvas and within its kind's size bounds.
[[nodiscard]] bool feasible(const Layout& layout, const SizeBounds& bounds);

[[nodiscard]] EnergyBreakdown total_energy(const Layout& layout, const EnergyWeights& w,
                                           const SizeBounds& bounds);

}  // namespace bannerforge
