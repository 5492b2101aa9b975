#pragma once

/// @file bitmap_font.hpp
/// Embedded 5x7 ASCII bitmap font, scaled by nearest neighbour.

#include <cstdint>
#include <string_view>

namespace bannerforge::font {

inline constexpr int kGlyphColumns = 5;
inline constexpr int kGlyphRows = 7;

/// True when pixel (col, row) of glyph `c` is set. Characters outside
/// printable ASCII render as '?'.
[[nodiscard]] bool glyph_pixel(char c, int col, int row);

/// Width in pixels of one glyph cell (without spacing) at `font_height`.
[[nodiscard]] int glyph_width(int font_height);
/// Horizontal distance between consecutive glyph origins.
[[nodiscard]] int advance(int font_height);
/// Rendered width of a string: advance * (n - 1) + glyph_width.
[[nodiscard]] int text_width(std::string_view text, int font_height);

}  // namespace bannerforge::font
