#include "bannerforge/compositor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bannerforge/bitmap_font.hpp"

namespace bannerforge {

namespace {

void require_inside(const Raster& raster, const PixelRect& r, const char* what) {
  if (r.x0 < 0 || r.y0 < 0 || r.x1 > raster.width() || r.y1 > raster.height() || r.x1 < r.x0 || r.y1 < r.y0) {
    throw std::out_of_range(std::string(what) + ": region outside raster");
  }
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

double linearize(std::uint8_t c) {
  const double v = c / 255.0;
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

PixelRect clamp_rect(PixelRect r, int width, int height) {
  r.x0 = std::clamp(r.x0, 0, width);
  r.x1 = std::clamp(r.x1, 0, width);
  r.y0 = std::clamp(r.y0, 0, height);
  r.y1 = std::clamp(r.y1, 0, height);
  return r;
}

int place(double center, int size, int extent) {
  const int start = static_cast<int>(std::lround(center - size / 2.0));
  return std::clamp(start, 0, std::max(0, extent - size));
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::istringstream in{std::string(text)};
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

/// Greedy wrap; empty result when some word is wider than the box.
std::vector<std::string> wrap(const std::vector<std::string>& words, int max_width, int font_height) {
  std::vector<std::string> lines;
  std::string cur;
  for (const auto& word : words) {
    if (font::text_width(word, font_height) > max_width) return {};
    std::string candidate = cur.empty() ? word : cur + " " + word;
    if (font::text_width(candidate, font_height) <= max_width) {
      cur = std::move(candidate);
    } else {
      lines.push_back(std::move(cur));
      cur = word;
    }
  }
  if (!cur.empty()) lines.push_back(std::move(cur));
  return lines;
}

}  // namespace

std::pair<int, int> max_aspect_size(int width, int height, double aspect) {
  int h = 0;
  if (aspect * height <= width) {
    h = height;
  } else {
    h = static_cast<int>(std::floor(width / aspect));
  }
  h = std::clamp(h, 1, height);
  const int w = std::clamp(static_cast<int>(std::lround(aspect * h)), 1, width);
  return {w, h};
}

PixelRect center_crop_rect(int width, int height, double aspect) {
  if (!(aspect > 0.0)) throw std::invalid_argument("aspect must be positive");
  const auto [w, h] = max_aspect_size(width, height, aspect);
  const int x0 = (width - w) / 2;
  const int y0 = (height - h) / 2;
  return {x0, y0, x0 + w, y0 + h};
}

Raster center_crop_baseline(const Raster& image, double aspect) {
  return image.crop(center_crop_rect(image.width(), image.height(), aspect));
}

CropResult crop_roi(const Raster& image, const ImageAnnotation& ann, double aspect) {
  if (!(aspect > 0.0)) throw std::invalid_argument("aspect must be positive");
  const int W = image.width();
  const int H = image.height();

  std::vector<BBox> roi_boxes = ann.persons;
  if (!roi_boxes.empty()) {
    if (const auto art = dominant_article(ann)) roi_boxes.push_back(art->box);
  } else {
    for (const auto& a : ann.articles) roi_boxes.push_back(a.box);
  }

  CropResult out;
  const bool fallback = roi_boxes.empty();
  BBox roi{0.0, 0.0, static_cast<double>(W), static_cast<double>(H)};
  if (!fallback) {
    roi = roi_boxes.front();
    for (const auto& b : roi_boxes) roi = hull(roi, b);
  }
  const int rx0 = std::clamp(static_cast<int>(std::floor(roi.x_left)), 0, W);
  const int ry0 = std::clamp(static_cast<int>(std::floor(roi.y_top)), 0, H);
  const int rx1 = std::clamp(static_cast<int>(std::ceil(roi.x_right)), rx0 + 1, std::max(W, rx0 + 1));
  const int ry1 = std::clamp(static_cast<int>(std::ceil(roi.y_bottom)), ry0 + 1, std::max(H, ry0 + 1));
  const int rw = rx1 - rx0;
  const int rh = ry1 - ry0;

  int w = 0;
  int h = 0;
  if (static_cast<double>(rw) <= aspect * rh) {
    h = rh;
    w = static_cast<int>(std::ceil(aspect * h - 1e-9));
  } else {
    h = static_cast<int>(std::ceil(rw / aspect - 1e-9));
    w = std::max(rw, static_cast<int>(std::lround(aspect * h)));
  }
  if (w > W || h > H) {
    std::tie(w, h) = max_aspect_size(W, H, aspect);
    out.roi_clipped = !fallback;
  }

  const double cx = 0.5 * (rx0 + rx1);
  const double cy = 0.5 * (ry0 + ry1);
  const int x0 = place(cx, w, W);
  const int y0 = place(cy, h, H);
  out.rect = {x0, y0, x0 + w, y0 + h};
  out.offset_x = -x0;
  out.offset_y = -y0;
  out.raster = image.crop(out.rect);
  return out;
}

ImageAnnotation reframe(const ImageAnnotation& ann, const CropResult& crop) {
  const BBox frame{0.0, 0.0, static_cast<double>(crop.rect.width()), static_cast<double>(crop.rect.height())};
  auto move = [&](const BBox& b) -> std::optional<BBox> {
    const BBox t = b.translated(crop.offset_x, crop.offset_y);
    const BBox c{std::max(t.x_left, frame.x_left), std::max(t.y_top, frame.y_top),
                 std::min(t.x_right, frame.x_right), std::min(t.y_bottom, frame.y_bottom)};
    if (c.area() <= 0.0) return std::nullopt;
    return c;
  };

  ImageAnnotation out = ann;
  out.width = crop.rect.width();
  out.height = crop.rect.height();
  out.persons.clear();
  out.faces.clear();
  out.articles.clear();
  out.text_regions.clear();
  for (const auto& b : ann.persons) {
    if (auto m = move(b)) out.persons.push_back(*m);
  }
  for (const auto& f : ann.faces) {
    if (auto m = move(f.box)) out.faces.push_back({*m, f.gender});
  }
  for (const auto& a : ann.articles) {
    if (auto m = move(a.box)) out.articles.push_back({a.category, *m, a.confidence});
  }
  for (const auto& b : ann.text_regions) {
    if (auto m = move(b)) out.text_regions.push_back(*m);
  }
  return out;
}

Raster apply_gradient(const Raster& raster, const PixelRect& region, double strength) {
  require_inside(raster, region, "apply_gradient");
  if (!(strength >= 0.0 && strength <= 1.0)) throw std::invalid_argument("gradient strength must lie in [0,1]");
  Raster out = raster;
  const int rows = region.height();
  for (int r = 0; r < rows; ++r) {
    const double t = rows > 1 ? static_cast<double>(r) / (rows - 1) : 1.0;
    const double factor = 1.0 - strength * t;
    for (int x = region.x0; x < region.x1; ++x) {
      Rgba c = out.at(x, region.y0 + r);
      c.r = to_byte(c.r * factor);
      c.g = to_byte(c.g * factor);
      c.b = to_byte(c.b * factor);
      out.set(x, region.y0 + r, c);
    }
  }
  return out;
}

double relative_luminance(Rgba c) {
  return 0.2126 * linearize(c.r) + 0.7152 * linearize(c.g) + 0.0722 * linearize(c.b);
}

double contrast_ratio(double lum_a, double lum_b) {
  const auto [lo, hi] = std::minmax(lum_a, lum_b);
  return (hi + 0.05) / (lo + 0.05);
}

double mean_luminance(const Raster& raster, const PixelRect& region) {
  require_inside(raster, region, "mean_luminance");
  if (region.empty()) return 0.0;
  double sum = 0.0;
  for (int y = region.y0; y < region.y1; ++y) {
    for (int x = region.x0; x < region.x1; ++x) sum += relative_luminance(raster.at(x, y));
  }
  return sum / (static_cast<double>(region.width()) * region.height());
}

Rgba choose_text_color(const Raster& raster, const PixelRect& region) {
  const double lum = mean_luminance(raster, region);
  const Rgba primary = lum < 0.5 ? kTextWhite : kTextNearBlack;
  const Rgba other = lum < 0.5 ? kTextNearBlack : kTextWhite;
  const double c_primary = contrast_ratio(lum, relative_luminance(primary));
  if (c_primary >= kMinContrastRatio) return primary;
  const double c_other = contrast_ratio(lum, relative_luminance(other));
  return c_other > c_primary ? other : primary;
}

int golden_line_height(int font_height) { return static_cast<int>(std::lround(kGoldenRatio * font_height)); }

TextBlock layout_text(std::string_view text, const PixelRect& box, int min_font) {
  const auto words = split_words(text);
  if (words.empty()) throw std::invalid_argument("layout_text: text is blank");
  const int floor_font = std::max(min_font, kMinFontHeight);
  for (int fh = box.height(); fh >= floor_font; --fh) {
    auto lines = wrap(words, box.width(), fh);
    if (lines.empty()) continue;
    const int lh = golden_line_height(fh);
    if (static_cast<long>(lines.size()) * lh > box.height()) continue;
    TextBlock block;
    block.lines = std::move(lines);
    block.style.font_height = fh;
    block.style.line_height = lh;
    return block;
  }
  std::ostringstream msg;
  msg << "text \"" << text << "\" does not fit a " << box.width() << "x" << box.height() << " box at font height "
      << floor_font << " (needs " << font::text_width(words.front(), floor_font) << "px for the first word, "
      << golden_line_height(floor_font) << "px per line)";
  throw TextOverflowError(msg.str());
}

Rgba blend_over(Rgba dst, Rgba src) {
  if (src.a == 255) return src;
  if (src.a == 0) return dst;
  const double sa = src.a / 255.0;
  const double da = dst.a / 255.0;
  const double oa = sa + da * (1.0 - sa);
  auto channel = [&](std::uint8_t s, std::uint8_t d) { return to_byte((s * sa + d * da * (1.0 - sa)) / oa); };
  return {channel(src.r, dst.r), channel(src.g, dst.g), channel(src.b, dst.b), to_byte(oa * 255.0)};
}

Raster render_text(const Raster& raster, const std::vector<std::string>& lines, const TextStyle& style,
                   const PixelRect& box) {
  require_inside(raster, box, "render_text");
  Raster out = raster;
  const int fh = style.font_height;
  const int gw = font::glyph_width(fh);
  const int adv = font::advance(fh);
  const int lh = style.line_height > 0 ? style.line_height : golden_line_height(fh);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    const int top = box.y0 + static_cast<int>(i) * lh + (lh - fh) / 2;
    const int left = style.alignment == TextAlign::center
                         ? box.x0 + (box.width() - font::text_width(line, fh)) / 2
                         : box.x0;
    for (std::size_t k = 0; k < line.size(); ++k) {
      const int gx = left + static_cast<int>(k) * adv;
      for (int dy = 0; dy < fh; ++dy) {
        const int y = top + dy;
        if (y < box.y0 || y >= box.y1) continue;
        const int row = dy * font::kGlyphRows / fh;
        for (int dx = 0; dx < gw; ++dx) {
          const int x = gx + dx;
          if (x < box.x0 || x >= box.x1) continue;
          if (!font::glyph_pixel(line[k], dx * font::kGlyphColumns / gw, row)) continue;
          out.set(x, y, blend_over(out.at(x, y), style.color));
        }
      }
    }
  }
  return out;
}

PixelRect letterbox(const PixelRect& box, int overlay_width, int overlay_height) {
  const double s = std::min(static_cast<double>(box.width()) / overlay_width,
                            static_cast<double>(box.height()) / overlay_height);
  const int dw = std::clamp(static_cast<int>(std::lround(overlay_width * s)), 1, std::max(1, box.width()));
  const int dh = std::clamp(static_cast<int>(std::lround(overlay_height * s)), 1, std::max(1, box.height()));
  const int x0 = box.x0 + (box.width() - dw) / 2;
  const int y0 = box.y0 + (box.height() - dh) / 2;
  return {x0, y0, x0 + dw, y0 + dh};
}

Raster paste(const Raster& base, const Raster& overlay, const PixelRect& box) {
  require_inside(base, box, "paste");
  Raster out = base;
  if (box.empty() || overlay.empty()) return out;
  const PixelRect dst = letterbox(box, overlay.width(), overlay.height());
  const int dw = dst.width();
  const int dh = dst.height();
  for (int dy = 0; dy < dh; ++dy) {
    const int sy = std::min(overlay.height() - 1, (2 * dy + 1) * overlay.height() / (2 * dh));
    for (int dx = 0; dx < dw; ++dx) {
      const int sx = std::min(overlay.width() - 1, (2 * dx + 1) * overlay.width() / (2 * dw));
      const int x = dst.x0 + dx;
      const int y = dst.y0 + dy;
      out.set(x, y, blend_over(out.at(x, y), overlay.at(sx, sy)));
    }
  }
  return out;
}

Raster compose(const Raster& image, const ImageAnnotation& ann, const Layout& layout, const Raster& logo,
               const std::vector<std::string>& callouts, const ComposeOptions& options) {
  const CropResult crop = crop_roi(image, ann, options.target_aspect);
  if (layout.canvas_width != crop.rect.width() || layout.canvas_height != crop.rect.height()) {
    throw std::invalid_argument("compose: layout canvas " + std::to_string(layout.canvas_width) + "x" +
                                std::to_string(layout.canvas_height) + " does not match crop " +
                                std::to_string(crop.rect.width()) + "x" + std::to_string(crop.rect.height()));
  }
  Raster out = crop.raster;

  std::size_t text_index = 0;
  for (const auto& e : layout.elements) {
    if (e.kind != ElementKind::text) continue;
    const std::size_t i = text_index++;
    if (i >= callouts.size() || callouts[i].find_first_not_of(" \t\n") == std::string::npos) continue;
    const PixelRect rect = clamp_rect(to_pixel_rect(e.box), out.width(), out.height());
    if (options.gradient) out = apply_gradient(out, rect, options.gradient_strength);
    TextBlock block = layout_text(callouts[i], rect, options.min_font);
    block.style.color = choose_text_color(out, rect);
    block.style.alignment = options.alignment;
    out = render_text(out, block.lines, block.style, rect);
  }
  for (const auto& e : layout.elements) {
    if (e.kind != ElementKind::logo) continue;
    out = paste(out, logo, clamp_rect(to_pixel_rect(e.box), out.width(), out.height()));
  }
  return out;
}

}  // namespace bannerforge
