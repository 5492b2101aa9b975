#include "bannerforge/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "bannerforge/compositor.hpp"
#include "bannerforge/ga_optimizer.hpp"
#include "bannerforge/metrics.hpp"
#include "bannerforge/pipeline.hpp"
#include "bannerforge/random.hpp"
#include "bannerforge/raster.hpp"

namespace bannerforge {

namespace {

const std::vector<std::string>& scene_category_pool() {
  static const std::vector<std::string> pool = {
      "beach",  "street", "garden", "studio",   "cafe",        "park",    "restaurant", "office", "mountain", "forest",
      "market", "rooftop", "living_room", "bedroom", "pool", "desert", "city", "harbor", "gym", "library"};
  return pool;
}

const std::vector<std::string>& scene_attribute_pool() {
  static const std::vector<std::string> pool = {
      "natural_light", "man_made", "open_area", "sunny",   "cloudy",  "warm",    "cold",     "vegetation",
      "urban",         "indoor_lighting", "wood", "glass", "water",   "sand",    "snow",     "crowded",
      "minimal",       "colorful", "shadows", "reflective", "grass", "stone",   "fabric",   "metal"};
  return pool;
}

/// Index drawn with probability proportional to 1 / (i + 1).
std::size_t zipf(Rng& rng, std::size_t n) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += 1.0 / static_cast<double>(i + 1);
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < n; ++i) {
    u -= 1.0 / static_cast<double>(i + 1);
    if (u < 0.0) return i;
  }
  return n - 1;
}

std::set<std::string> draw_labels(Rng& rng, const std::vector<std::string>& pool, std::size_t max_count) {
  std::set<std::string> out;
  const std::size_t count = 1 + static_cast<std::size_t>(rng.below(max_count));
  for (std::size_t i = 0; i < count; ++i) out.insert(pool[zipf(rng, pool.size())]);
  return out;
}

Gender draw_gender(Rng& rng) {
  const double u = rng.uniform();
  return u < 0.45 ? Gender::female : (u < 0.9 ? Gender::male : Gender::unknown);
}

struct AnnotationShape {
  std::size_t min_persons = 1;
  std::size_t max_persons = 3;
  double text_region_prob = 0.2;
};

ImageAnnotation random_annotation(Rng& rng, std::string id, int width, int height, const AnnotationShape& shape) {
  ImageAnnotation ann;
  ann.image_id = std::move(id);
  ann.width = width;
  ann.height = height;
  ann.brand = "synthetic";
  ann.season = "all";
  const double w = width;
  const double h = height;
  const std::size_t persons =
      shape.min_persons + static_cast<std::size_t>(rng.below(shape.max_persons - shape.min_persons + 1));
  for (std::size_t p = 0; p < persons; ++p) {
    const double pw = rng.uniform(0.12, 0.4) * w;
    const double ph = rng.uniform(0.5, 1.0) * h;
    const double x = rng.uniform(0.0, w - pw);
    const double y = rng.uniform(0.0, h - ph);
    ann.persons.push_back({x, y, x + pw, y + ph});
    const double fw = 0.45 * pw;
    const double fh = std::min(1.2 * fw, 0.22 * ph);
    const double fx = x + (pw - fw) / 2.0;
    const double fy = y + 0.03 * ph;
    ann.faces.push_back({{fx, fy, fx + fw, fy + fh}, draw_gender(rng)});
    const double conf = rng.uniform(0.6, 1.0);
    if (rng.bernoulli(0.7)) {
      ann.articles.push_back({ArticleCategory::topwear, {x + 0.1 * pw, y + 0.28 * ph, x + 0.9 * pw, y + 0.55 * ph}, conf});
    }
    if (rng.bernoulli(0.5)) {
      ann.articles.push_back(
          {ArticleCategory::bottomwear, {x + 0.15 * pw, y + 0.55 * ph, x + 0.85 * pw, y + 0.9 * ph}, conf});
    }
    if (rng.bernoulli(0.3)) {
      ann.articles.push_back({ArticleCategory::shoes, {x + 0.15 * pw, y + 0.9 * ph, x + 0.85 * pw, y + ph}, conf});
    }
  }
  if (rng.bernoulli(0.3)) {
    static constexpr ArticleCategory kSmall[] = {ArticleCategory::watches, ArticleCategory::bags,
                                                 ArticleCategory::headgear, ArticleCategory::other};
    const auto cat = kSmall[rng.below(4)];
    const double aw = rng.uniform(0.05, 0.15) * w;
    const double ah = rng.uniform(0.08, 0.2) * h;
    const double x = rng.uniform(0.0, w - aw);
    const double y = rng.uniform(0.0, h - ah);
    ann.articles.push_back({cat, {x, y, x + aw, y + ah}, rng.uniform(0.6, 1.0)});
  }
  ann.scene.environment = rng.bernoulli(0.5) ? Environment::outdoor : Environment::indoor;
  ann.scene.categories = draw_labels(rng, scene_category_pool(), 3);
  ann.scene.attributes = draw_labels(rng, scene_attribute_pool(), 4);
  if (rng.bernoulli(shape.text_region_prob)) {
    const double tw = rng.uniform(0.1, 0.25) * w;
    const double th = rng.uniform(0.05, 0.15) * h;
    const double x = rng.uniform(0.0, w - tw);
    const double y = rng.uniform(0.0, h - th);
    ann.text_regions.push_back({x, y, x + tw, y + th});
  }
  return ann;
}

BBox random_box(Rng& rng, double w, double h, double min_wf, double max_wf, double min_hf, double max_hf) {
  const double bw = rng.uniform(min_wf, max_wf) * w;
  const double bh = rng.uniform(min_hf, max_hf) * h;
  const double x = rng.uniform(0.0, w - bw);
  const double y = rng.uniform(0.0, h - bh);
  return {x, y, x + bw, y + bh};
}

double logit(double p) { return std::log(p / (1.0 - p)); }

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

double expected_auc(std::span<const double> p) {
  const std::size_t n = p.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  // num = sum_i p_i * [sum_{p_j < p_i} (1 - p_j) + 1/2 sum_{p_j == p_i, j != i} (1 - p_j)]
  long double num = 0;
  long double below_neg = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    long double group_neg = 0;
    while (j < n && p[order[j]] == p[order[i]]) group_neg += 1.0L - p[order[j++]];
    for (std::size_t k = i; k < j; ++k) {
      const long double pk = p[order[k]];
      num += pk * (below_neg + 0.5L * (group_neg - (1.0L - pk)));
    }
    below_neg += group_neg;
    i = j;
  }
  long double sum_p = 0;
  long double sum_q = 0;
  long double self = 0;
  for (const double x : p) {
    sum_p += x;
    sum_q += 1.0L - x;
    self += x * (1.0L - x);
  }
  const long double den = sum_p * sum_q - self;
  if (den <= 0) throw std::invalid_argument("expected_auc: needs both possible outcomes");
  return static_cast<double>(num / den);
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 2) throw std::invalid_argument("generate_synthetic: n must be >= 2");
  if (!(spec.base_rate > 0.0 && spec.base_rate < 1.0)) throw std::invalid_argument("base_rate must lie in (0,1)");
  Rng rng(spec.seed);
  SyntheticData out;
  out.planted_feature = kPlantedFeature;
  const double w = spec.canvas_width;
  const double h = spec.canvas_height;
  char id[32];
  for (std::size_t i = 0; i < spec.n; ++i) {
    std::snprintf(id, sizeof(id), "syn_%05zu", i);
    auto ann = random_annotation(rng, id, spec.canvas_width, spec.canvas_height, {});
    Layout layout{spec.canvas_width, spec.canvas_height, fixed_elements(ann)};
    layout.elements.push_back({ElementKind::logo, random_box(rng, w, h, 0.1, 0.3, 0.08, 0.25), true, std::nullopt});
    layout.elements.push_back({ElementKind::text, random_box(rng, w, h, 0.3, 0.6, 0.15, 0.35), true, std::nullopt});
    out.annotations.push_back(std::move(ann));
    out.layouts.push_back(std::move(layout));
  }
  out.schema = build_schema(out.annotations, spec.k_scene);
  const std::size_t planted = out.schema.index_of(kPlantedFeature).value();

  out.dataset.feature_names = dense_names(out.schema, false, false);
  out.dataset.fingerprint = names_fingerprint(out.dataset.feature_names);
  double mean = 0.0;
  for (std::size_t i = 0; i < spec.n; ++i) {
    auto vec = extract(out.annotations[i], out.layouts[i], out.schema);
    mean += vec.values[planted];
    out.dataset.rows.push_back({out.annotations[i].image_id, std::move(vec.values), 0, 0.0, std::nullopt, std::nullopt});
  }
  mean /= static_cast<double>(spec.n);
  double var = 0.0;
  for (const auto& r : out.dataset.rows) var += (r.values[planted] - mean) * (r.values[planted] - mean);
  const double sd = std::sqrt(var / static_cast<double>(spec.n));

  // Labels use their own stream so the features do not depend on strength or noise mode.
  Rng label_rng(derive_seed(spec.seed, 0x1abe1));
  const double intercept = logit(spec.base_rate);
  for (auto& r : out.dataset.rows) {
    const double z = sd > 0.0 ? (r.values[planted] - mean) / sd : 0.0;
    const double p = sigmoid(spec.strength * z + intercept);
    out.click_probability.push_back(p);
    r.ctr = p;
    r.is_clicked = spec.zero_noise ? (p >= 0.5 ? 1 : 0) : (label_rng.bernoulli(p) ? 1 : 0);
  }
  if (spec.zero_noise) {
    const auto labels = out.dataset.labels();
    const bool both = std::count(labels.begin(), labels.end(), 1) > 0 && std::count(labels.begin(), labels.end(), 0) > 0;
    out.bayes_auc = both ? auc(out.click_probability, labels) : 0.5;
  } else {
    out.bayes_auc = expected_auc(out.click_probability);
  }
  return out;
}

std::vector<HistoricalBannerRecord> generate_records(const RecordSpec& spec) {
  Rng rng(spec.seed);
  std::vector<HistoricalBannerRecord> out;
  out.reserve(spec.n);
  char id[32];
  for (std::size_t i = 0; i < spec.n; ++i) {
    std::snprintf(id, sizeof(id), "hist_%05zu", i);
    HistoricalBannerRecord r;
    r.banner_id = id;
    r.e_align = rng.uniform();
    r.e_overlap = rng.uniform();
    r.e_dist = rng.uniform();
    r.e_sym = rng.uniform();
    const auto t = r.terms();
    double ctr = spec.base_ctr;
    for (std::size_t j = 0; j < 4; ++j) ctr -= spec.coefficients[j] * t[j];
    r.ctr = ctr + rng.normal(0.0, spec.sigma);
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------- demo corpus

namespace {

void fill(Raster& r, const BBox& b, Rgba c) {
  const PixelRect p = to_pixel_rect(b);
  for (int y = std::max(0, p.y0); y < std::min(r.height(), p.y1); ++y) {
    for (int x = std::max(0, p.x0); x < std::min(r.width(), p.x1); ++x) r.set(x, y, c);
  }
}

void fill_ellipse(Raster& r, const BBox& b, Rgba c) {
  const PixelRect p = to_pixel_rect(b);
  const double cx = (p.x0 + p.x1) / 2.0;
  const double cy = (p.y0 + p.y1) / 2.0;
  const double rx = p.width() / 2.0;
  const double ry = p.height() / 2.0;
  for (int y = std::max(0, p.y0); y < std::min(r.height(), p.y1); ++y) {
    for (int x = std::max(0, p.x0); x < std::min(r.width(), p.x1); ++x) {
      const double dx = (x + 0.5 - cx) / rx;
      const double dy = (y + 0.5 - cy) / ry;
      if (dx * dx + dy * dy <= 1.0) r.set(x, y, c);
    }
  }
}

Rgba mix(Rgba a, Rgba b, double t) {
  auto ch = [t](std::uint8_t x, std::uint8_t y) { return static_cast<std::uint8_t>(std::lround(x + (y - x) * t)); };
  return {ch(a.r, b.r), ch(a.g, b.g), ch(a.b, b.b), 255};
}

Rgba random_color(Rng& rng, int lo, int hi) {
  auto ch = [&] { return static_cast<std::uint8_t>(lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)))); };
  const auto r = ch();
  const auto g = ch();
  const auto b = ch();
  return {r, g, b, 255};
}

Raster paint(const ImageAnnotation& ann, Rng& rng) {
  Raster img(ann.width, ann.height);
  const Rgba top = random_color(rng, 120, 230);
  const Rgba bottom = random_color(rng, 40, 160);
  for (int y = 0; y < ann.height; ++y) {
    const Rgba row = mix(top, bottom, static_cast<double>(y) / std::max(1, ann.height - 1));
    for (int x = 0; x < ann.width; ++x) {
      const bool stripe = ((x + y) / 24) % 2 == 0;
      img.set(x, y, stripe ? row : mix(row, Rgba{255, 255, 255, 255}, 0.06));
    }
  }
  for (const auto& t : ann.text_regions) {
    fill(img, t, {30, 30, 30, 255});
    for (double y = t.y_top + 3; y + 3 < t.y_bottom; y += 8) fill(img, {t.x_left + 3, y, t.x_right - 3, y + 3}, {230, 230, 230, 255});
  }
  for (const auto& p : ann.persons) fill(img, {p.x_left + p.width() * 0.1, p.y_top + p.height() * 0.2, p.x_right - p.width() * 0.1, p.y_bottom}, random_color(rng, 60, 110));
  static constexpr Rgba kArticle[] = {{200, 40, 60, 255},  {40, 70, 160, 255}, {30, 30, 30, 255}, {210, 180, 40, 255},
                                      {140, 80, 30, 255},  {60, 140, 90, 255}, {150, 150, 150, 255}};
  for (const auto& a : ann.articles) fill(img, a.box, kArticle[static_cast<int>(a.category)]);
  for (const auto& f : ann.faces) fill_ellipse(img, f.box, {224, 182, 150, 255});
  return img;
}

Raster make_logo(std::string_view text, Rgba color) {
  Raster logo(120, 60, {0, 0, 0, 0});
  fill_ellipse(logo, {0, 0, 120, 60}, color);
  const PixelRect box{14, 16, 106, 44};
  TextBlock block = layout_text(text, box);
  block.style.color = {255, 255, 255, 255};
  block.style.alignment = TextAlign::center;
  return render_text(logo, block.lines, block.style, box);
}

void write_text(const std::filesystem::path& path, const std::string& text) { write_file_atomic(path, text); }

}  // namespace

void write_demo_corpus(const std::filesystem::path& dir, std::uint64_t seed) {
  using nlohmann::json;
  Rng rng(seed);
  static constexpr std::pair<int, int> kSizes[] = {{480, 320}, {400, 400}, {520, 300}, {360, 420}};
  std::vector<ImageAnnotation> corpus;
  for (int i = 1; i <= 12; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "demo_%02d", i);
    const auto [w, h] = kSizes[static_cast<std::size_t>(i - 1) % 4];
    AnnotationShape shape;
    shape.text_region_prob = 0.0;
    if (i == 5) shape.min_persons = shape.max_persons = 0;
    auto ann = random_annotation(rng, id, w, h, shape);
    if (i == 5) ann.faces.clear();
    ann.brand = i <= 8 ? "northwind" : "aurora";
    ann.season = i % 2 ? "summer" : "winter";
    if (i == 7) ann.text_regions.push_back({0.0, 0.0, w * 0.6, h * 0.4});  // too much text; filtered out
    corpus.push_back(std::move(ann));
  }
  for (const auto& ann : corpus) {
    write_png(dir / "images" / (ann.image_id + ".png"), paint(ann, rng));
    write_text(dir / "annotations" / (ann.image_id + ".json"), serialize_annotation(ann));
  }

  write_png(dir / "logos" / "northwind.png", make_logo("NW", {20, 60, 140, 255}));
  write_png(dir / "logos" / "aurora.png", make_logo("AURORA", {150, 30, 90, 230}));
  ElementLibrary lib;
  lib.logos = {{"northwind", "logos/northwind.png"}, {"aurora", "logos/aurora.png"}};
  lib.callouts = {{"Summer Sale Up To 40% Off", {"sale", "summer"}},
                  {"Flat 30% Off Today", {"sale"}},
                  {"New Season Arrivals", {"launch"}},
                  {"Fresh Styles Just Landed", {"launch"}},
                  {"Made For The Weekend", {"brand"}},
                  {"Comfort Meets Style", {"brand"}}};
  write_text(dir / "library.json", serialize_element_library(lib));

  // Ranking artifacts: a small forest trained on planted-signal data that
  // shares the demo's scene label pools.
  SyntheticSpec syn;
  syn.n = 1500;
  syn.seed = derive_seed(seed, 1);
  const auto data = generate_synthetic(syn);
  ModelSpec spec;
  spec.kind = ModelKind::random_forest;
  spec.forest.n_trees = 25;
  spec.tree.max_depth = 6;
  spec.seed = derive_seed(seed, 2);
  write_text(dir / "schema.json", serialize_schema(data.schema));
  write_text(dir / "model.json", serialize_model(train(data.dataset, spec)));

  const json pipeline = {
      {"annotations", "annotations"},
      {"images", "images"},
      {"library", "library.json"},
      {"schema", "schema.json"},
      {"model", "model.json"},
      {"output", "out"},
      {"seed", 7},
      {"request",
       {{"brand", "northwind"}, {"theme", "sale"}, {"max_text_area_fraction", 0.1}, {"target_aspect", 2.0}, {"top_k", 3}}},
      {"elements",
       {{"logo", {{"width", 0.2}, {"height", 0.2}, {"min_width", 0.1}, {"max_width", 0.3}, {"min_height", 0.1}, {"max_height", 0.3}}},
        {"text", {{"width", 0.45}, {"height", 0.25}, {"min_width", 0.3}, {"max_width", 0.6}, {"min_height", 0.18}, {"max_height", 0.4}}},
        {"text_count", 1}}},
      {"weights", {{"w_align", 1.0}, {"w_overlap", 4.0}, {"w_dist", 1.0}, {"w_sym", 1.0}}},
      {"ga", {{"population_size", 60}, {"generations", 80}}},
      {"compose", {{"gradient", true}, {"gradient_strength", 0.25}, {"min_font", 8}, {"alignment", "left"}}}};
  write_text(dir / "pipeline.json", pipeline.dump(2) + "\n");

  LayoutProblem prob;
  prob.canvas_width = 400;
  prob.canvas_height = 200;
  prob.fixed = {{ElementKind::person, {150, 20, 250, 200}, false, BBox{180, 25, 220, 70}},
                {ElementKind::object, {160, 80, 240, 140}, false, std::nullopt}};
  prob.movable = {{ElementKind::logo, 80, 40}, {ElementKind::text, 160, 50}};
  prob.bounds.logo = {80, 80, 40, 40};
  prob.bounds.text = {160, 160, 50, 50};
  json problem = json::parse(serialize_layout_problem(prob));
  GAConfig ga;
  ga.lattice_steps = 16;
  problem["ga"] = json::parse(serialize_ga_config(ga));
  problem["grid_steps"] = 16;
  write_text(dir / "layout_problem.json", problem.dump(2) + "\n");
}

}  // namespace bannerforge
