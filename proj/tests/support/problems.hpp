#pragma once

#include <cmath>
#include <cstdint>

#include "bannerforge/ga_optimizer.hpp"
#include "bannerforge/random.hpp"

namespace fixtures {

/// Person with a face plus a held object; logo and text at fixed sizes.
inline bannerforge::LayoutProblem reference_problem() {
  using namespace bannerforge;
  LayoutProblem p;
  p.canvas_width = 400;
  p.canvas_height = 200;
  p.fixed.push_back({ElementKind::person, {150, 20, 250, 200}, false, BBox{180, 25, 220, 70}});
  p.fixed.push_back({ElementKind::object, {160, 80, 240, 140}, false, std::nullopt});
  p.movable = {{ElementKind::logo, 80, 40}, {ElementKind::text, 160, 50}};
  p.bounds.logo = {80, 80, 40, 40};
  p.bounds.text = {160, 160, 50, 50};
  return p;
}

/// Random two-element problem with fixed element sizes, so that GA and
/// lattice search explore the same space.
inline bannerforge::LayoutProblem seeded_problem(std::uint64_t seed) {
  using namespace bannerforge;
  Rng rng(derive_seed(seed, 0x9b));
  LayoutProblem p;
  p.canvas_width = 320 + static_cast<int>(rng.below(5)) * 40;
  p.canvas_height = 160 + static_cast<int>(rng.below(4)) * 40;
  const double W = p.canvas_width, H = p.canvas_height;
  const double pw = rng.uniform(0.15, 0.3) * W, ph = rng.uniform(0.6, 1.0) * H;
  const double px = rng.uniform(0, W - pw), py = H - ph;
  const BBox person{px, py, px + pw, H};
  const BBox face{px + 0.3 * pw, py + 0.02 * ph, px + 0.7 * pw, py + 0.22 * ph};
  p.fixed.push_back({ElementKind::person, person, false, face});
  const double ow = rng.uniform(0.1, 0.2) * W, oh = rng.uniform(0.1, 0.25) * H;
  const double ox = rng.uniform(0, W - ow), oy = rng.uniform(0, H - oh);
  p.fixed.push_back({ElementKind::object, {ox, oy, ox + ow, oy + oh}, false, std::nullopt});
  const double lw = std::round(rng.uniform(0.15, 0.25) * W), lh = std::round(rng.uniform(0.15, 0.25) * H);
  const double tw = std::round(rng.uniform(0.3, 0.5) * W), th = std::round(rng.uniform(0.2, 0.3) * H);
  p.movable = {{ElementKind::logo, lw, lh}, {ElementKind::text, tw, th}};
  p.bounds.logo = {lw, lw, lh, lh};
  p.bounds.text = {tw, tw, th, th};
  return p;
}

}  // namespace fixtures
