#pragma once

/// @file compositor.hpp
/// Raster steps that turn a photo, a layout and design elements into a
/// banner: region-of-interest crop, darkening gradient, text colour choice,
/// golden-ratio text layout and rendering, logo pasting.
///
/// Every operation takes its inputs by const reference and returns a new
/// raster.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bannerforge/annotation.hpp"
#include "bannerforge/layout_energy.hpp"
#include "bannerforge/raster.hpp"

namespace bannerforge {

inline constexpr double kGoldenRatio = 1.618;
inline constexpr int kMinFontHeight = 8;
inline constexpr double kDefaultGradientStrength = 0.25;
inline constexpr double kMinContrastRatio = 4.5;
inline constexpr Rgba kTextWhite{255, 255, 255, 255};
inline constexpr Rgba kTextNearBlack{16, 16, 16, 255};

struct CropResult {
  Raster raster;
  PixelRect rect;       ///< crop window in source pixels
  int offset_x = 0;     ///< crop coordinate = source coordinate + offset
  int offset_y = 0;
  bool roi_clipped = false;  ///< region of interest did not fit at the requested aspect
};

/// Largest rectangle of aspect `aspect` (width / height) that fits in
/// width x height; width is within one pixel of aspect * height.
[[nodiscard]] std::pair<int, int> max_aspect_size(int width, int height, double aspect);

/// Crop window containing persons plus the dominant article (falling back
/// to all articles, then the full image), grown to `aspect` around the
/// region's center and slid to stay inside the image. If the region needs
/// more room than the image has, the window is the largest one of that
/// aspect, still centered on the region, and roi_clipped is set.
[[nodiscard]] CropResult crop_roi(const Raster& image, const ImageAnnotation& ann, double aspect);

/// Largest centered window of the aspect.
[[nodiscard]] Raster center_crop_baseline(const Raster& image, double aspect);
[[nodiscard]] PixelRect center_crop_rect(int width, int height, double aspect);

/// Annotation re-expressed in crop coordinates; boxes are clipped to the
/// crop and dropped if nothing remains.
[[nodiscard]] ImageAnnotation reframe(const ImageAnnotation& ann, const CropResult& crop);

/// Vertical darkening over `region`: RGB scale ramps from 1 on the first row
/// to 1 - strength on the last. Alpha untouched. Throws std::out_of_range if
/// the region leaves the raster.
[[nodiscard]] Raster apply_gradient(const Raster& raster, const PixelRect& region, double strength);

/// WCAG relative luminance of an 8-bit sRGB colour.
[[nodiscard]] double relative_luminance(Rgba c);
[[nodiscard]] double contrast_ratio(double lum_a, double lum_b);
/// Mean relative luminance of the region's pixels.
[[nodiscard]] double mean_luminance(const Raster& raster, const PixelRect& region);

/// White on dark regions (mean luminance < 0.5), near-black otherwise; if
/// the pick misses 4.5:1 contrast the other extreme is used instead.
[[nodiscard]] Rgba choose_text_color(const Raster& raster, const PixelRect& region);

enum class TextAlign { left, center };

struct TextStyle {
  int font_height = kMinFontHeight;
  int line_height = 0;  ///< round(golden ratio * font_height)
  Rgba color = kTextWhite;
  TextAlign alignment = TextAlign::left;
};

[[nodiscard]] int golden_line_height(int font_height);

struct TextBlock {
  std::vector<std::string> lines;
  TextStyle style;
};

class TextOverflowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Greedy word wrap at the largest font height (searched down from the box
/// height) whose lines all fit the box width and whose lines * line_height
/// fit the box height. Throws TextOverflowError when even `min_font` fails,
/// std::invalid_argument for blank text.
[[nodiscard]] TextBlock layout_text(std::string_view text, const PixelRect& box, int min_font = kMinFontHeight);

/// Draws the lines into `box`, clipped to it.
[[nodiscard]] Raster render_text(const Raster& raster, const std::vector<std::string>& lines,
                                 const TextStyle& style, const PixelRect& box);

/// Source-over blend of one pixel.
[[nodiscard]] Rgba blend_over(Rgba dst, Rgba src);

/// Overlay scaled (nearest neighbour) to fit `box` with its aspect kept,
/// centered, then blended source-over. Throws std::out_of_range.
[[nodiscard]] Raster paste(const Raster& base, const Raster& overlay, const PixelRect& box);
/// Where paste() puts the scaled overlay inside `box`.
[[nodiscard]] PixelRect letterbox(const PixelRect& box, int overlay_width, int overlay_height);

struct ComposeOptions {
  double target_aspect = 2.0;
  bool gradient = true;
  double gradient_strength = kDefaultGradientStrength;
  int min_font = kMinFontHeight;
  TextAlign alignment = TextAlign::left;
};

/// crop_roi, then per text element: gradient, colour, layout, render; then
/// the logo is pasted into each logo element. Text element i receives
/// callouts[i]; missing or empty callouts leave that element blank.
/// The layout canvas must match the crop dimensions.
[[nodiscard]] Raster compose(const Raster& image, const ImageAnnotation& ann, const Layout& layout,
                             const Raster& logo, const std::vector<std::string>& callouts,
                             const ComposeOptions& options);

}  // namespace bannerforge
