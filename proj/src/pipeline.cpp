#include "bannerforge/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <spdlog/spdlog.h>

#include "bannerforge/ctr_ranker.hpp"
#include "bannerforge/error.hpp"
#include "bannerforge/hash.hpp"
#include "bannerforge/raster.hpp"
#include "layout_json.hpp"

namespace bannerforge {

namespace fs = std::filesystem;
using detail::json;

// ---------------------------------------------------------------- config

namespace {

json compose_options_json(const ComposeOptions& o) {
  return {{"target_aspect", o.target_aspect},
          {"gradient", o.gradient},
          {"gradient_strength", o.gradient_strength},
          {"min_font", o.min_font},
          {"alignment", o.alignment == TextAlign::center ? "center" : "left"}};
}

ComposeOptions compose_options_from_json(const json& v, const std::string& path, ComposeOptions o = {}) {
  if (!v.is_object()) throw DataError(path, "expected an object");
  o.target_aspect = detail::number_or(v, "target_aspect", o.target_aspect, path);
  if (const json* g = detail::optional_field(v, "gradient")) o.gradient = detail::as_bool(*g, detail::join_path(path, "gradient"));
  o.gradient_strength = detail::number_or(v, "gradient_strength", o.gradient_strength, path);
  if (const json* f = detail::optional_field(v, "min_font")) {
    o.min_font = static_cast<int>(detail::as_integer(*f, detail::join_path(path, "min_font")));
  }
  if (const json* a = detail::optional_field(v, "alignment")) {
    const auto ap = detail::join_path(path, "alignment");
    const auto text = detail::as_string(*a, ap);
    if (text == "left") {
      o.alignment = TextAlign::left;
    } else if (text == "center") {
      o.alignment = TextAlign::center;
    } else {
      throw DataError(ap, "expected left or center");
    }
  }
  return o;
}

ElementSizing sizing_from_json(const json& v, const std::string& path, ElementSizing s) {
  if (!v.is_object()) throw DataError(path, "expected an object");
  s.width = detail::number_or(v, "width", s.width, path);
  s.height = detail::number_or(v, "height", s.height, path);
  s.min_width = detail::number_or(v, "min_width", s.min_width, path);
  s.max_width = detail::number_or(v, "max_width", s.max_width, path);
  s.min_height = detail::number_or(v, "min_height", s.min_height, path);
  s.max_height = detail::number_or(v, "max_height", s.max_height, path);
  return s;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::optional<fs::path> optional_path(const json& doc, std::string_view key, const fs::path& base) {
  const json* v = detail::optional_field(doc, key);
  if (!v) return std::nullopt;
  return resolve(base, detail::as_string(*v, std::string(key)));
}

void check_sizing(const ElementSizing& s, const char* what) {
  const bool ok = s.min_width > 0 && s.min_width <= s.max_width && s.max_width <= 1.0 && s.min_height > 0 &&
                  s.min_height <= s.max_height && s.max_height <= 1.0 && s.width > 0 && s.width <= 1.0 &&
                  s.height > 0 && s.height <= 1.0;
  if (!ok) throw ConfigError(std::string(what) + " sizing must satisfy 0 < min <= max <= 1 and 0 < size <= 1");
}

}  // namespace

ComposeOptions parse_compose_options(std::string_view json_text) {
  return compose_options_from_json(detail::parse_json(json_text, "compose"), "");
}

std::string serialize_compose_options(const ComposeOptions& options) {
  return compose_options_json(options).dump(2) + "\n";
}

void PipelineConfig::validate() const {
  if (top_k < 1) throw ConfigError("top_k must be >= 1");
  if (text_count < 1) throw ConfigError("text_count must be >= 1");
  if (!(target_aspect > 0.0) || !std::isfinite(target_aspect)) throw ConfigError("target_aspect must be positive");
  if (!(filter.max_text_area_fraction >= 0.0 && filter.max_text_area_fraction <= 1.0)) {
    throw ConfigError("max_text_area_fraction must lie in [0,1]");
  }
  if (!weights.valid()) throw ConfigError("energy weights must be non-negative with one positive");
  if (model_path && !schema_path) throw ConfigError("a model needs the feature schema it was trained with");
  if (!(compose.gradient_strength >= 0.0 && compose.gradient_strength <= 1.0)) {
    throw ConfigError("gradient_strength must lie in [0,1]");
  }
  if (compose.min_font < 1) throw ConfigError("min_font must be >= 1");
  check_sizing(logo, "logo");
  check_sizing(text, "text");
  ga.validate();
}

PipelineConfig parse_pipeline_config(std::string_view json_text, const fs::path& base_dir) {
  const json doc = detail::parse_json(json_text, "config");
  if (!doc.is_object()) throw DataError("config", "expected an object");
  PipelineConfig cfg;
  auto required_path = [&](std::string_view key) {
    return resolve(base_dir, detail::as_string(detail::require(doc, key, ""), std::string(key)));
  };
  cfg.annotations_dir = required_path("annotations");
  cfg.images_dir = required_path("images");
  cfg.library_path = required_path("library");
  cfg.output_dir = required_path("output");
  cfg.schema_path = optional_path(doc, "schema", base_dir);
  cfg.model_path = optional_path(doc, "model", base_dir);
  cfg.external_path = optional_path(doc, "external", base_dir);
  if (const json* seed = detail::optional_field(doc, "seed")) {
    const auto v = detail::as_integer(*seed, "seed");
    if (v < 0) throw DataError("seed", "must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(v);
  }

  if (const json* req = detail::optional_field(doc, "request")) {
    const std::string rp = "request";
    if (const json* b = detail::optional_field(*req, "brand")) cfg.filter.brand = detail::as_string(*b, rp + ".brand");
    if (const json* c = detail::optional_field(*req, "category")) {
      const auto text = detail::as_string(*c, rp + ".category");
      cfg.filter.category = parse_category(text);
      if (!cfg.filter.category) throw DataError(rp + ".category", "unknown category '" + text + "'");
    }
    if (const json* e = detail::optional_field(*req, "environment")) {
      const auto text = detail::as_string(*e, rp + ".environment");
      cfg.filter.environment = parse_environment(text);
      if (!cfg.filter.environment) throw DataError(rp + ".environment", "expected indoor or outdoor");
    }
    if (const json* g = detail::optional_field(*req, "required_gender")) {
      const auto text = detail::as_string(*g, rp + ".required_gender");
      cfg.filter.required_gender = parse_gender(text);
      if (!cfg.filter.required_gender) throw DataError(rp + ".required_gender", "expected male, female or unknown");
    }
    cfg.filter.max_text_area_fraction =
        detail::number_or(*req, "max_text_area_fraction", cfg.filter.max_text_area_fraction, rp);
    if (const json* t = detail::optional_field(*req, "theme")) cfg.theme = detail::as_string(*t, rp + ".theme");
    cfg.target_aspect = detail::number_or(*req, "target_aspect", cfg.target_aspect, rp);
    if (const json* k = detail::optional_field(*req, "top_k")) {
      const auto v = detail::as_integer(*k, rp + ".top_k");
      if (v < 1) throw ConfigError("request.top_k must be >= 1");
      cfg.top_k = static_cast<std::size_t>(v);
    }
  }
  if (const json* el = detail::optional_field(doc, "elements")) {
    if (const json* l = detail::optional_field(*el, "logo")) cfg.logo = sizing_from_json(*l, "elements.logo", cfg.logo);
    if (const json* t = detail::optional_field(*el, "text")) cfg.text = sizing_from_json(*t, "elements.text", cfg.text);
    if (const json* n = detail::optional_field(*el, "text_count")) {
      const auto v = detail::as_integer(*n, "elements.text_count");
      if (v < 1) throw ConfigError("elements.text_count must be >= 1");
      cfg.text_count = static_cast<std::size_t>(v);
    }
  }
  if (const json* w = detail::optional_field(doc, "weights")) {
    if (w->is_string()) {
      cfg.weights_path = resolve(base_dir, w->get<std::string>());
      cfg.weights = parse_weights(read_text_file(*cfg.weights_path));
    } else {
      cfg.weights = detail::weights_from_json(*w, "weights");
    }
  }
  if (const json* g = detail::optional_field(doc, "ga")) cfg.ga = detail::ga_config_from_json(*g, "ga");
  if (const json* c = detail::optional_field(doc, "compose")) cfg.compose = compose_options_from_json(*c, "compose");
  cfg.compose.target_aspect = cfg.target_aspect;
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------- helpers

std::vector<ElementBox> fixed_elements(const ImageAnnotation& ann) {
  std::vector<ElementBox> out;
  for (const auto& p : ann.persons) {
    ElementBox e{ElementKind::person, p, false, std::nullopt};
    double best = 0.0;
    for (const auto& f : ann.faces) {
      const double cx = f.box.center_x();
      const double cy = f.box.center_y();
      const bool inside = cx >= p.x_left && cx <= p.x_right && cy >= p.y_top && cy <= p.y_bottom;
      if (inside && f.box.area() > best) {
        best = f.box.area();
        e.focus = f.box;
      }
    }
    out.push_back(e);
  }
  for (const auto& a : ann.articles) out.push_back({ElementKind::object, a.box, false, std::nullopt});
  return out;
}

LayoutProblem make_layout_problem(const ImageAnnotation& cropped, const PipelineConfig& cfg) {
  LayoutProblem prob;
  prob.canvas_width = cropped.width;
  prob.canvas_height = cropped.height;
  prob.fixed = fixed_elements(cropped);
  const double w = cropped.width;
  const double h = cropped.height;
  auto bounds = [&](const ElementSizing& s) {
    return KindBounds{s.min_width * w, s.max_width * w, s.min_height * h, s.max_height * h};
  };
  prob.bounds.logo = bounds(cfg.logo);
  prob.bounds.text = bounds(cfg.text);
  prob.movable.push_back({ElementKind::logo, cfg.logo.width * w, cfg.logo.height * h});
  for (std::size_t i = 0; i < cfg.text_count; ++i) {
    prob.movable.push_back({ElementKind::text, cfg.text.width * w, cfg.text.height * h});
  }
  prob.weights = cfg.weights;
  prob.validate();
  return prob;
}

std::vector<ImageAnnotation> load_annotations(const fs::path& dir, std::vector<BannerFailure>* failures) {
  if (!fs::is_directory(dir)) throw DataError(dir.string(), "annotation directory not found");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ImageAnnotation> out;
  for (const auto& f : files) {
    try {
      out.push_back(parse_annotation(read_text_file(f)));
    } catch (const DataError& e) {
      if (!failures) throw DataError(f.string() + ": " + e.where(), e.what());
      failures->push_back({f.stem().string(), "annotation", f.filename().string() + ": " + e.what()});
    }
  }
  return out;
}

namespace {

json banner_json(const BannerEntry& b) {
  return {{"id", b.id},
          {"image_id", b.image_id},
          {"layout_rank", b.layout_rank},
          {"image", b.image_file},
          {"sidecar", b.sidecar_file},
          {"predicted_ctr", b.predicted_ctr ? json(*b.predicted_ctr) : json(nullptr)},
          {"energy", detail::energy_to_json(b.energy)},
          {"layout", detail::layout_to_json(b.layout)},
          {"provenance",
           {{"brand", b.brand},
            {"logo", b.logo_file},
            {"callouts", b.callouts},
            {"crop", {b.crop.x0, b.crop.y0, b.crop.x1, b.crop.y1}},
            {"roi_clipped", b.roi_clipped}}}};
}

std::vector<std::string> pick_callouts(const std::vector<const CalloutEntry*>& pool, std::size_t count,
                                       std::uint64_t seed) {
  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span(order));
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(pool[order[i % order.size()]]->text);
  return out;
}

}  // namespace

std::string serialize_manifest(const BannerManifest& m) {
  json banners = json::array();
  for (const auto& b : m.banners) banners.push_back(banner_json(b));
  json failures = json::array();
  for (const auto& f : m.failures) failures.push_back({{"image_id", f.image_id}, {"stage", f.stage}, {"error", f.error}});
  const json doc = {{"format", "bannerforge-manifest"},
                    {"version", 1},
                    {"seed", m.seed},
                    {"ordering", m.ranked_by_ctr ? "predicted_ctr" : "energy"},
                    {"images_considered", m.images_considered},
                    {"banner_count", m.banners.size()},
                    {"banners", banners},
                    {"failures", failures}};
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------- run

BannerManifest run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  BannerManifest manifest;
  manifest.seed = cfg.seed;

  const auto catalog = load_annotations(cfg.annotations_dir, &manifest.failures);
  const ElementLibrary library = parse_element_library(read_text_file(cfg.library_path));
  if (const auto v = validate(library); !v.empty()) throw DataError(cfg.library_path.string() + ": " + v.front().path, v.front().message);
  const auto pool = library.callouts_for(cfg.theme);
  if (pool.empty()) throw ConfigError("no callout is tagged with theme '" + cfg.theme + "'");
  if (cfg.filter.brand && !library.logo_for(*cfg.filter.brand)) {
    throw ConfigError("no logo for brand '" + *cfg.filter.brand + "'");
  }

  std::vector<ImageAnnotation> valid;
  for (const auto& ann : catalog) {
    const auto violations = validate(ann);
    if (violations.empty()) {
      valid.push_back(ann);
    } else {
      manifest.failures.push_back({ann.image_id, "validate", violations.front().path + ": " + violations.front().message});
    }
  }
  const auto selected_ids = filter_images(valid, cfg.filter);
  if (selected_ids.empty()) throw ConfigError("no catalog image matches the request");
  manifest.images_considered = selected_ids.size();

  std::optional<FeatureSchema> schema;
  if (cfg.schema_path) schema = parse_schema(read_text_file(*cfg.schema_path));
  std::optional<TrainedModel> model;
  if (cfg.model_path) model = parse_model(read_text_file(*cfg.model_path));
  std::map<std::string, ExternalFeatures> external;
  if (cfg.external_path) external = parse_external_sidecar(read_text_file(*cfg.external_path));
  manifest.ranked_by_ctr = model.has_value();

  const fs::path banner_dir = cfg.output_dir / "banners";
  fs::create_directories(banner_dir);
  std::map<std::string, Raster> logos;
  std::vector<FeatureRow> feature_rows;

  for (const auto& ann : valid) {
    if (std::find(selected_ids.begin(), selected_ids.end(), ann.image_id) == selected_ids.end()) continue;
    std::string stage = "logo";
    try {
      const LogoEntry* logo_entry = library.logo_for(ann.brand);
      if (!logo_entry) throw DataError(ann.image_id, "no logo for brand '" + ann.brand + "'");
      const fs::path logo_path = resolve(cfg.library_path.parent_path(), logo_entry->path);
      auto logo_it = logos.find(ann.brand);
      if (logo_it == logos.end()) logo_it = logos.emplace(ann.brand, read_png(logo_path)).first;

      stage = "image";
      const Raster image = read_png(cfg.images_dir / (ann.image_id + ".png"));
      if (image.width() != ann.width || image.height() != ann.height) {
        throw DataError(ann.image_id, "image is " + std::to_string(image.width()) + "x" + std::to_string(image.height()) +
                                          " but the annotation says " + std::to_string(ann.width) + "x" +
                                          std::to_string(ann.height));
      }

      stage = "crop";
      const CropResult crop = crop_roi(image, ann, cfg.target_aspect);
      const ImageAnnotation cropped = reframe(ann, crop);

      stage = "layout";
      const LayoutProblem prob = make_layout_problem(cropped, cfg);
      GAConfig ga = cfg.ga;
      ga.rng_seed = derive_seed(cfg.seed, fnv1a64(ann.image_id));
      const GARun run = evolve(prob, ga);
      const auto ranked = run.top_layouts(prob, cfg.top_k);
      spdlog::info("{}: crop {}x{}, best energy {:.6f}, {} layouts", ann.image_id, crop.rect.width(),
                   crop.rect.height(), run.best_energy, ranked.size());

      // Banners of one image are built in memory first so a failure leaves
      // no partial set behind.
      struct Pending {
        BannerEntry entry;
        Raster raster;
        json sidecar;
      };
      std::vector<Pending> pending;
      for (std::size_t k = 0; k < ranked.size(); ++k) {
        BannerEntry b;
        b.id = ann.image_id + "_L" + std::to_string(k + 1);
        b.image_id = ann.image_id;
        b.layout_rank = k + 1;
        b.layout = ranked[k].layout;
        b.energy = ranked[k].energy;
        b.brand = ann.brand;
        b.logo_file = logo_entry->path;
        b.callouts = pick_callouts(pool, cfg.text_count, derive_seed(cfg.seed, fnv1a64(b.id)));
        b.crop = crop.rect;
        b.roi_clipped = crop.roi_clipped;
        b.image_file = "banners/" + b.id + ".png";
        b.sidecar_file = "banners/" + b.id + ".json";

        stage = "compose";
        Raster banner = compose(image, ann, b.layout, logo_it->second, b.callouts, cfg.compose);

        if (schema) {
          stage = "features";
          FeatureVector vec = extract(cropped, b.layout, *schema);
          if (const auto ext = external.find(b.id); ext != external.end()) {
            std::optional<std::span<const double>> vgg;
            if (ext->second.vgg) vgg = std::span<const double>(*ext->second.vgg);
            vec = attach_external(std::move(vec), vgg, ext->second.nima);
          }
          if (model) {
            stage = "predict";
            b.predicted_ctr = predict_ctr(*model, vec);
          }
          feature_rows.push_back({b.id, std::move(vec)});
        }

        json sidecar = banner_json(b);
        sidecar["annotation"] = json::parse(serialize_annotation(cropped));
        sidecar["options"] = {{"compose", compose_options_json(cfg.compose)},
                              {"ga", detail::ga_config_to_json(ga)},
                              {"weights", detail::weights_to_json(cfg.weights)}};
        pending.push_back({std::move(b), std::move(banner), std::move(sidecar)});
      }

      stage = "write";
      for (auto& p : pending) {
        write_png(cfg.output_dir / p.entry.image_file, p.raster);
        write_file_atomic(cfg.output_dir / p.entry.sidecar_file, p.sidecar.dump(2) + "\n");
        manifest.banners.push_back(std::move(p.entry));
      }
    } catch (const std::exception& e) {
      spdlog::warn("{}: {} failed: {}", ann.image_id, stage, e.what());
      manifest.failures.push_back({ann.image_id, stage, e.what()});
      std::erase_if(feature_rows, [&](const FeatureRow& r) { return r.banner_id.rfind(ann.image_id + "_L", 0) == 0; });
    }
  }

  std::sort(manifest.banners.begin(), manifest.banners.end(), [&](const BannerEntry& a, const BannerEntry& b) {
    if (manifest.ranked_by_ctr && *a.predicted_ctr != *b.predicted_ctr) return *a.predicted_ctr > *b.predicted_ctr;
    if (!manifest.ranked_by_ctr && a.energy.total != b.energy.total) return a.energy.total < b.energy.total;
    return a.id < b.id;
  });
  std::sort(manifest.failures.begin(), manifest.failures.end(),
            [](const BannerFailure& a, const BannerFailure& b) { return a.image_id < b.image_id; });

  if (schema) write_file_atomic(cfg.output_dir / "features.csv", feature_matrix_csv(*schema, feature_rows));
  write_file_atomic(cfg.output_dir / "manifest.json", serialize_manifest(manifest));
  return manifest;
}

std::vector<FeatureRow> features_from_output(const fs::path& output_dir, const FeatureSchema& schema,
                                             const std::optional<fs::path>& external_path) {
  const fs::path manifest_path = output_dir / "manifest.json";
  const json manifest = detail::parse_json(read_text_file(manifest_path), manifest_path.string());
  std::map<std::string, ExternalFeatures> external;
  if (external_path) external = parse_external_sidecar(read_text_file(*external_path));
  std::vector<FeatureRow> rows;
  const auto& banners = detail::as_array(detail::require(manifest, "banners", ""), "banners");
  for (std::size_t i = 0; i < banners.size(); ++i) {
    const auto path = detail::index_path("banners", i);
    const auto id = detail::as_string(detail::require(banners[i], "id", path), path + ".id");
    const auto sidecar_file = detail::as_string(detail::require(banners[i], "sidecar", path), path + ".sidecar");
    const fs::path sidecar_path = output_dir / sidecar_file;
    const json sidecar = detail::parse_json(read_text_file(sidecar_path), sidecar_path.string());
    const ImageAnnotation ann = parse_annotation(detail::require(sidecar, "annotation", sidecar_path.string()).dump());
    const Layout layout = detail::layout_from_json(detail::require(sidecar, "layout", sidecar_path.string()), "layout");
    FeatureVector vec = extract(ann, layout, schema);
    if (const auto ext = external.find(id); ext != external.end()) {
      std::optional<std::span<const double>> vgg;
      if (ext->second.vgg) vgg = std::span<const double>(*ext->second.vgg);
      vec = attach_external(std::move(vec), vgg, ext->second.nima);
    }
    rows.push_back({id, std::move(vec)});
  }
  return rows;
}

}  // namespace bannerforge
