#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "bannerforge/bitmap_font.hpp"
#include "bannerforge/compositor.hpp"
#include "bannerforge/error.hpp"

using namespace bannerforge;

namespace {

Raster noise(int w, int h, std::uint32_t seed, bool random_alpha = false) {
  std::mt19937 g(seed);
  Raster r(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      r.set(x, y, {std::uint8_t(g()), std::uint8_t(g()), std::uint8_t(g()), random_alpha ? std::uint8_t(g()) : std::uint8_t(255)});
  return r;
}

ImageAnnotation ann_of(int w, int h) {
  ImageAnnotation a;
  a.image_id = "t";
  a.width = w;
  a.height = h;
  return a;
}

bool inside(const PixelRect& r, int x, int y) { return x >= r.x0 && x < r.x1 && y >= r.y0 && y < r.y1; }

/// Pixels differing between a and b that lie outside every allowed rect.
int stray_changes(const Raster& a, const Raster& b, const std::vector<PixelRect>& allowed) {
  int n = 0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x)
      if (!(a.at(x, y) == b.at(x, y)) &&
          std::none_of(allowed.begin(), allowed.end(), [&](const PixelRect& r) { return inside(r, x, y); }))
        ++n;
  return n;
}

double hand_luminance(int v) {
  const double c = v / 255.0;
  const double lin = c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
  return lin;  // grey: all three channels equal, weights sum to 1
}

}  // namespace

TEST(CropRoi, NoBoxesSquareImageIsIdentity) {
  const Raster img = noise(100, 100, 1);
  const auto c = crop_roi(img, ann_of(100, 100), 1.0);
  EXPECT_EQ(c.rect, (PixelRect{0, 0, 100, 100}));
  EXPECT_EQ(c.offset_x, 0);
  EXPECT_EQ(c.offset_y, 0);
  EXPECT_EQ(c.raster, img);
}

TEST(CropRoi, TallPersonForcesFullImage) {
  auto a = ann_of(100, 100);
  a.persons = {{40, 0, 60, 100}};
  EXPECT_EQ(crop_roi(noise(100, 100, 2), a, 1.0).rect, (PixelRect{0, 0, 100, 100}));
}

TEST(CropRoi, CornerPersonContainedAtAspect) {
  auto a = ann_of(200, 100);
  a.persons = {{0, 0, 50, 50}};
  const auto c = crop_roi(noise(200, 100, 3), a, 2.0);
  EXPECT_TRUE(c.rect.to_bbox().contains(a.persons[0]));
  EXPECT_LE(std::abs(c.rect.width() - 2 * c.rect.height()), 1);
  EXPECT_FALSE(c.roi_clipped);
  EXPECT_EQ(c.raster.width(), c.rect.width());
}

TEST(CropRoi, RandomRequestsKeepAspectAndContainment) {
  std::mt19937 g(4);
  std::uniform_int_distribution<int> dim(40, 300);
  std::uniform_real_distribution<double> asp(0.3, 3.5), u(0, 1);
  for (int i = 0; i < 200; ++i) {
    const int W = dim(g), H = dim(g);
    auto a = ann_of(W, H);
    const double x = u(g) * (W - 2), y = u(g) * (H - 2);
    a.persons = {{x, y, x + 1 + u(g) * (W - x - 1), y + 1 + u(g) * (H - y - 1)}};
    const double aspect = asp(g);
    const auto c = crop_roi(Raster(W, H), a, aspect);
    EXPECT_LE(std::fabs(c.rect.width() - aspect * c.rect.height()), 1.0) << W << "x" << H << " @" << aspect;
    EXPECT_GE(c.rect.x0, 0);
    EXPECT_LE(c.rect.x1, W);
    EXPECT_GE(c.rect.y0, 0);
    EXPECT_LE(c.rect.y1, H);
    if (!c.roi_clipped) {
      EXPECT_TRUE(c.rect.to_bbox().contains(a.persons[0]));
    }
  }
}

TEST(CropRoi, ReframeMapsIntoCrop) {
  auto a = ann_of(400, 200);
  a.persons = {{250, 20, 300, 180}};
  a.faces = {{{260, 25, 290, 60}, Gender::female}};
  a.articles = {{ArticleCategory::topwear, {255, 60, 295, 120}, 0.9}, {ArticleCategory::bags, {0, 0, 10, 10}, 0.9}};
  const auto c = crop_roi(Raster(400, 200), a, 1.0);
  const auto r = reframe(a, c);
  EXPECT_EQ(r.width, c.rect.width());
  EXPECT_EQ(r.persons[0], a.persons[0].translated(c.offset_x, c.offset_y));
  EXPECT_TRUE(validate(r).empty());
}

TEST(CenterCrop, Examples) {
  EXPECT_EQ(center_crop_rect(400, 400, 2.0), (PixelRect{0, 100, 400, 300}));
  EXPECT_EQ(center_crop_rect(300, 200, 1.5), (PixelRect{0, 0, 300, 200}));
  EXPECT_EQ(center_crop_rect(300, 100, 1.0), (PixelRect{100, 0, 200, 100}));
  const Raster img = noise(300, 100, 5);
  EXPECT_EQ(center_crop_baseline(img, 1.0), img.crop({100, 0, 200, 100}));
}

TEST(CenterCrop, RandomAspects) {
  std::mt19937 g(6);
  std::uniform_int_distribution<int> dim(10, 500);
  std::uniform_real_distribution<double> asp(0.2, 5.0);
  for (int i = 0; i < 200; ++i) {
    const int W = dim(g), H = dim(g);
    const double aspect = asp(g);
    const auto r = center_crop_rect(W, H, aspect);
    EXPECT_LE(std::fabs(r.width() - aspect * r.height()), 1.0);
    EXPECT_TRUE(r.width() == W || r.height() == H || std::fabs(r.width() - aspect * r.height()) <= 1.0);
    EXPECT_LE(std::abs((r.x0) - (W - r.x1)), 1);
    EXPECT_LE(std::abs((r.y0) - (H - r.y1)), 1);
  }
}

TEST(ApplyGradient, Examples) {
  const Raster img = noise(50, 40, 7);
  EXPECT_EQ(apply_gradient(img, {5, 5, 45, 35}, 0.0), img);

  const Raster full = apply_gradient(img, {0, 0, 50, 40}, 1.0);
  for (int x = 0; x < 50; ++x) {
    const Rgba p = full.at(x, 39);
    EXPECT_EQ(p.r, 0);
    EXPECT_EQ(p.g, 0);
    EXPECT_EQ(p.b, 0);
    EXPECT_EQ(p.a, img.at(x, 39).a);
  }
  EXPECT_EQ(full.at(3, 0), img.at(3, 0));

  const Raster grey(20, 20, {200, 200, 200, 255});
  const Raster half = apply_gradient(grey, {0, 0, 20, 20}, 0.5);
  EXPECT_NEAR(half.at(10, 19).r, 100, 1);
  EXPECT_THROW((void)apply_gradient(grey, {0, 0, 21, 20}, 0.5), std::out_of_range);
}

TEST(ApplyGradient, LocalAndMonotone) {
  const Raster img(60, 60, {180, 120, 90, 200});
  const PixelRect region{10, 15, 40, 50};
  const Raster out = apply_gradient(img, region, 0.4);
  EXPECT_EQ(stray_changes(img, out, {region}), 0);
  for (int y = region.y0 + 1; y < region.y1; ++y) EXPECT_LE(out.at(20, y).r, out.at(20, y - 1).r);
}

TEST(ChooseTextColor, Examples) {
  EXPECT_EQ(choose_text_color(Raster(10, 10, {0, 0, 0, 255}), {0, 0, 10, 10}), kTextWhite);
  EXPECT_EQ(choose_text_color(Raster(10, 10, {255, 255, 255, 255}), {0, 0, 10, 10}), kTextNearBlack);
}

TEST(ChooseTextColor, MidGreyForcesOtherExtreme) {
  // Grey 128 is darker than 0.5 so white is the first pick, but white only
  // reaches about 3.95:1 there while near-black clears 4.5:1.
  const double L = hand_luminance(128);
  const double white = (1.0 + 0.05) / (L + 0.05);
  const double dark = (L + 0.05) / (hand_luminance(16) + 0.05);
  ASSERT_LT(L, 0.5);
  ASSERT_LT(white, 4.5);
  ASSERT_GE(dark, 4.5);
  EXPECT_NEAR(relative_luminance({128, 128, 128, 255}), L, 1e-12);
  EXPECT_NEAR(contrast_ratio(1.0, L), white, 1e-12);
  EXPECT_EQ(choose_text_color(Raster(8, 8, {128, 128, 128, 255}), {0, 0, 8, 8}), kTextNearBlack);
  // A dark grey keeps white.
  EXPECT_EQ(choose_text_color(Raster(8, 8, {60, 60, 60, 255}), {0, 0, 8, 8}), kTextWhite);
}

TEST(LayoutText, Examples) {
  const auto one = layout_text("Sale", {0, 0, 200, 40});
  ASSERT_EQ(one.lines.size(), 1u);
  EXPECT_EQ(one.lines[0], "Sale");
  EXPECT_EQ(one.style.line_height, golden_line_height(one.style.font_height));
  EXPECT_GE(one.style.font_height, kMinFontHeight);
  // No larger font would fit the box.
  const int fh = one.style.font_height;
  EXPECT_TRUE(font::text_width("Sale", fh + 1) > 200 || golden_line_height(fh + 1) > 40);

  // Two 4-letter words where the box fits exactly 4 characters per line at font 8.
  const int w4 = font::text_width("ABCD", 8);
  const auto two = layout_text("ABCD EFGH", {0, 0, w4, golden_line_height(8) * 2});
  EXPECT_EQ(two.lines, (std::vector<std::string>{"ABCD", "EFGH"}));
  EXPECT_EQ(two.style.font_height, 8);

  EXPECT_THROW((void)layout_text("W", {0, 0, 3, 3}), TextOverflowError);
  EXPECT_THROW((void)layout_text("   ", {0, 0, 100, 100}), std::invalid_argument);
}

TEST(LayoutText, GoldenRatioInvariant) {
  for (int fh = 8; fh < 200; ++fh) EXPECT_EQ(golden_line_height(fh), static_cast<int>(std::lround(1.618 * fh)));
  std::mt19937 g(8);
  std::uniform_int_distribution<int> d(30, 300);
  for (int i = 0; i < 100; ++i) {
    const PixelRect box{0, 0, d(g), d(g) / 2 + 20};
    try {
      const auto b = layout_text("Flat 30% Off On New Arrivals Today", box);
      EXPECT_LE(static_cast<int>(b.lines.size()) * b.style.line_height, box.height());
      for (const auto& l : b.lines) EXPECT_LE(font::text_width(l, b.style.font_height), box.width());
    } catch (const TextOverflowError&) {
    }
  }
}

TEST(RenderText, EmptyLinesAndLocality) {
  const Raster img = noise(120, 80, 9);
  TextStyle s;
  s.font_height = 12;
  s.line_height = golden_line_height(12);
  EXPECT_EQ(render_text(img, {}, s, {10, 10, 100, 60}), img);
  const PixelRect box{10, 10, 70, 40};
  const Raster out = render_text(img, {"HELLO WORLD", "SECOND"}, s, box);
  EXPECT_NE(out, img);
  EXPECT_EQ(stray_changes(img, out, {box}), 0);
  EXPECT_EQ(render_text(out, {"HELLO WORLD", "SECOND"}, s, box), out);
}

TEST(Paste, Examples) {
  const Raster base = noise(100, 100, 10);
  EXPECT_EQ(paste(base, Raster(20, 10, {255, 0, 0, 0}), {10, 10, 50, 50}), base);

  const Raster logo = noise(20, 10, 11);
  const Raster exact = paste(base, logo, {30, 30, 70, 50});
  for (int y = 30; y < 50; ++y)
    for (int x = 30; x < 70; ++x) EXPECT_EQ(exact.at(x, y), logo.at((x - 30) / 2, (y - 30) / 2));

  const Raster boxed = paste(base, Raster(40, 20, {0, 255, 0, 255}), {0, 0, 40, 40});
  for (int x = 0; x < 40; ++x) {
    for (int y = 0; y < 10; ++y) EXPECT_EQ(boxed.at(x, y), base.at(x, y));
    for (int y = 30; y < 40; ++y) EXPECT_EQ(boxed.at(x, y), base.at(x, y));
    EXPECT_EQ(boxed.at(x, 20), (Rgba{0, 255, 0, 255}));
  }
  EXPECT_EQ(letterbox({0, 0, 40, 40}, 40, 20), (PixelRect{0, 10, 40, 30}));
  EXPECT_THROW((void)paste(base, logo, {90, 90, 110, 100}), std::out_of_range);
}

TEST(BlendOver, AlphaRules) {
  const Rgba d{10, 20, 30, 255};
  EXPECT_EQ(blend_over(d, {1, 2, 3, 0}), d);
  EXPECT_EQ(blend_over(d, {1, 2, 3, 255}), (Rgba{1, 2, 3, 255}));
  const Rgba half = blend_over({0, 0, 0, 255}, {200, 100, 50, 128});
  EXPECT_NEAR(half.r, 100, 1);
  EXPECT_EQ(half.a, 255);
}

TEST(Png, RoundTripLossless) {
  std::mt19937 g(12);
  std::uniform_int_distribution<int> d(1, 90);
  for (int i = 0; i < 20; ++i) {
    const Raster r = noise(d(g), d(g), static_cast<std::uint32_t>(i), true);
    EXPECT_EQ(decode_png(encode_png(r)), r);
  }
  const auto path = std::filesystem::temp_directory_path() / "bf_png_roundtrip.png";
  const Raster r = noise(33, 17, 99, true);
  write_png(path, r);
  EXPECT_EQ(read_png(path), r);
  std::filesystem::remove(path);
  const std::vector<std::uint8_t> junk{1, 2, 3, 4, 5, 6, 7, 8, 9};
  EXPECT_THROW((void)decode_png(junk), DataError);
}

TEST(Compose, LogoOnlyWhenNoGradientNoCallout) {
  const Raster img = noise(200, 100, 13);
  const auto a = ann_of(200, 100);
  const Raster logo = noise(20, 10, 14);
  Layout L{200, 100, {{ElementKind::logo, {10, 10, 50, 30}, true, std::nullopt}, {ElementKind::text, {60, 50, 180, 90}, true, std::nullopt}}};
  ComposeOptions o;
  o.gradient = false;
  const Raster crop = crop_roi(img, a, 2.0).raster;
  EXPECT_EQ(compose(img, a, L, logo, {""}, o), paste(crop, logo, {10, 10, 50, 30}));
}

TEST(Compose, DeterministicAndLocal) {
  std::mt19937 g(15);
  std::uniform_real_distribution<double> u(0, 1);
  const Raster logo = noise(30, 15, 16, true);
  for (int i = 0; i < 20; ++i) {
    const Raster img = noise(240, 180, static_cast<std::uint32_t>(100 + i));
    auto a = ann_of(240, 180);
    a.persons = {{100, 40, 140, 180}};
    const auto crop = crop_roi(img, a, 2.0);
    const int W = crop.rect.width(), H = crop.rect.height();
    const double lw = 0.2 * W, lh = 0.2 * H, tw = 0.5 * W, th = 0.3 * H;
    const double lx = u(g) * (W - lw), ly = u(g) * (H - lh), tx = u(g) * (W - tw), ty = u(g) * (H - th);
    Layout L{W, H, {{ElementKind::logo, {lx, ly, lx + lw, ly + lh}, true, std::nullopt},
                    {ElementKind::text, {tx, ty, tx + tw, ty + th}, true, std::nullopt}}};
    const std::vector<std::string> callouts{"Summer Sale"};
    const Raster out = compose(img, a, L, logo, callouts, {});
    EXPECT_EQ(out, compose(img, a, L, logo, callouts, {}));
    const std::vector<PixelRect> allowed{to_pixel_rect(L.elements[0].box), to_pixel_rect(L.elements[1].box)};
    EXPECT_EQ(stray_changes(crop.raster, out, allowed), 0);
  }
}

TEST(Compose, CanvasMismatchRejected) {
  const Raster img = noise(200, 100, 17);
  Layout L{100, 100, {{ElementKind::logo, {0, 0, 10, 10}, true, std::nullopt}}};
  EXPECT_THROW((void)compose(img, ann_of(200, 100), L, Raster(4, 4), {}, {}), std::invalid_argument);
}
