#include "bannerforge/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>

#include "bannerforge/csv.hpp"
#include "bannerforge/error.hpp"
#include "bannerforge/hash.hpp"
#include "json_util.hpp"

namespace bannerforge {

using detail::json;

namespace {

std::string sanitize(std::string_view label) {
  std::string out;
  out.reserve(label.size());
  for (const char c : label) {
    const auto u = static_cast<unsigned char>(c);
    out.push_back(std::isalnum(u) ? static_cast<char>(std::tolower(u)) : '_');
  }
  return out;
}

void add_scene_slots(std::vector<FeatureSlot>& slots, const std::vector<std::string>& labels, std::string_view group) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    std::string name = std::string(group) + "_" + std::to_string(i) + "_";
    name += labels[i].empty() ? "reserved" : sanitize(labels[i]);
    slots.push_back({std::move(name), std::string(group)});
  }
}

std::vector<std::string> top_labels(const std::map<std::string, std::size_t>& counts, std::size_t k) {
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  // std::map iteration is already lexicographic, so a stable sort on count keeps that tie-break.
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(i < ranked.size() ? ranked[i].first : std::string());
  return out;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void put_box(std::vector<double>& values, std::size_t at, const std::optional<BBox>& box, double w, double h) {
  if (!box) {
    std::fill_n(values.begin() + static_cast<std::ptrdiff_t>(at), 4, kAbsent);
    return;
  }
  values[at] = clamp01(box->x_left / w);
  values[at + 1] = clamp01(box->y_top / h);
  values[at + 2] = clamp01(box->x_right / w);
  values[at + 3] = clamp01(box->y_bottom / h);
}

std::optional<BBox> dominant_of(const std::vector<BBox>& boxes) {
  const auto i = dominant_index(boxes);
  if (!i) return std::nullopt;
  return boxes[*i];
}

/// Largest covered fraction of any one component by all text boxes together.
double covered_fraction(const std::vector<BBox>& components, const std::vector<BBox>& texts) {
  double best = 0.0;
  for (const auto& c : components) {
    if (c.area() <= 0.0) continue;
    double covered = 0.0;
    for (const auto& t : texts) covered += intersection_area(c, t);
    best = std::max(best, std::min(1.0, covered / c.area()));
  }
  return best;
}

BBox clip(const BBox& b, double w, double h) {
  return {std::clamp(b.x_left, 0.0, w), std::clamp(b.y_top, 0.0, h), std::clamp(b.x_right, 0.0, w),
          std::clamp(b.y_bottom, 0.0, h)};
}

}  // namespace

FeatureSchema::FeatureSchema(std::vector<std::string> scene_categories, std::vector<std::string> scene_attributes)
    : scene_categories_(std::move(scene_categories)), scene_attributes_(std::move(scene_attributes)) {
  for (const char* who : {"person", "face", "article", "text"}) {
    for (const char* edge : {"l", "t", "r", "b"}) {
      slots_.push_back({std::string("pos_") + who + "_" + edge, "position"});
    }
  }
  for (const char* who : {"person", "article", "text"}) slots_.push_back({std::string("area_") + who, "area"});
  for (const char* who : {"women", "men", "people"}) slots_.push_back({std::string("n_") + who, "gender"});
  for (const auto c : kAllCategories) slots_.push_back({"cat_" + std::string(to_string(c)), "category"});
  slots_.push_back({"env_outdoor", "environment"});
  add_scene_slots(slots_, scene_categories_, "scene_cat");
  add_scene_slots(slots_, scene_attributes_, "scene_attr");
  for (const char* who : {"face", "person", "article"}) slots_.push_back({std::string("overlap_text_") + who, "overlap"});
  for (const char* q : {"tl", "tr", "bl", "br"}) slots_.push_back({std::string("text_quad_") + q, "quadrant"});

  std::vector<std::string> names;
  for (const auto& s : slots_) names.push_back(s.name);
  fingerprint_ = names_fingerprint(names);
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (slots_[i].name == name) return i;
  }
  return std::nullopt;
}

FeatureSchema build_schema(std::span<const ImageAnnotation> corpus, std::size_t k_scene) {
  if (corpus.empty()) throw std::invalid_argument("build_schema needs a non-empty corpus");
  std::map<std::string, std::size_t> cats;
  std::map<std::string, std::size_t> attrs;
  for (const auto& ann : corpus) {
    for (const auto& c : ann.scene.categories) ++cats[c];
    for (const auto& a : ann.scene.attributes) ++attrs[a];
  }
  return FeatureSchema(top_labels(cats, k_scene), top_labels(attrs, k_scene));
}

std::string serialize_schema(const FeatureSchema& schema) {
  json slots = json::array();
  for (const auto& s : schema.slots()) slots.push_back({{"name", s.name}, {"group", s.group}});
  const json doc = {{"version", 1},
                    {"scene_categories", schema.scene_categories()},
                    {"scene_attributes", schema.scene_attributes()},
                    {"slots", slots},
                    {"fingerprint", hex64(schema.fingerprint())}};
  return doc.dump(2) + "\n";
}

FeatureSchema parse_schema(std::string_view json_text) {
  const json doc = detail::parse_json(json_text, "schema");
  auto labels = [&](std::string_view key) {
    const auto& arr = detail::as_array(detail::require(doc, key, ""), std::string(key));
    std::vector<std::string> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      out.push_back(detail::as_string(arr[i], detail::index_path(key, i)));
    }
    return out;
  };
  FeatureSchema schema(labels("scene_categories"), labels("scene_attributes"));
  if (const json* fp = detail::optional_field(doc, "fingerprint")) {
    if (detail::as_string(*fp, "fingerprint") != hex64(schema.fingerprint())) {
      throw DataError("fingerprint", "does not match the slot list");
    }
  }
  if (const json* slots = detail::optional_field(doc, "slots")) {
    const auto& arr = detail::as_array(*slots, "slots");
    if (arr.size() != schema.size()) throw DataError("slots", "slot count does not match scene labels");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto path = detail::index_path("slots", i);
      if (detail::as_string(detail::require(arr[i], "name", path), path + ".name") != schema.slots()[i].name) {
        throw DataError(path + ".name", "unexpected slot name");
      }
    }
  }
  return schema;
}

std::vector<double> FeatureVector::dense() const {
  std::vector<double> out = values;
  if (vgg) out.insert(out.end(), vgg->begin(), vgg->end());
  if (nima) out.push_back(*nima);
  return out;
}

std::uint64_t FeatureVector::fingerprint() const {
  return dense_fingerprint(schema_fingerprint, vgg.has_value(), nima.has_value());
}

std::vector<std::string> dense_names(const FeatureSchema& schema, bool has_vgg, bool has_nima) {
  std::vector<std::string> names;
  names.reserve(schema.size() + (has_vgg ? kVggDimension : 0) + 1);
  for (const auto& s : schema.slots()) names.push_back(s.name);
  if (has_vgg) {
    char buf[16];
    for (std::size_t i = 0; i < kVggDimension; ++i) {
      std::snprintf(buf, sizeof(buf), "vgg_%04zu", i);
      names.emplace_back(buf);
    }
  }
  if (has_nima) names.emplace_back("nima");
  return names;
}

std::uint64_t names_fingerprint(std::span<const std::string> names, std::uint64_t start) {
  std::uint64_t h = start;
  for (const auto& n : names) {
    h = fnv1a64(n, h);
    h = fnv1a64(std::string_view("\n"), h);
  }
  return h;
}

std::uint64_t names_fingerprint(std::span<const std::string> names) {
  return names_fingerprint(names, fnv1a64(std::string_view("bannerforge-features-v1")));
}

std::uint64_t dense_fingerprint(std::uint64_t schema_fingerprint, bool has_vgg, bool has_nima) {
  std::vector<std::string> extra = dense_names(FeatureSchema(), has_vgg, has_nima);
  return names_fingerprint(extra, schema_fingerprint);
}

FeatureVector extract(const ImageAnnotation& ann, const Layout& layout, const FeatureSchema& schema) {
  if (schema.size() == 0) throw std::invalid_argument("extract: empty schema");
  const double w = layout.canvas_width;
  const double h = layout.canvas_height;
  if (w <= 0 || h <= 0) throw std::invalid_argument("extract: layout canvas must be positive");
  if (ann.width != layout.canvas_width || ann.height != layout.canvas_height) {
    throw DataError(ann.image_id, "annotation and layout describe different canvases");
  }

  std::vector<BBox> faces;
  for (const auto& f : ann.faces) faces.push_back(f.box);
  std::vector<BBox> articles;
  for (const auto& a : ann.articles) articles.push_back(a.box);
  std::vector<BBox> texts;
  for (const auto& e : layout.elements) {
    if (e.kind == ElementKind::text) texts.push_back(e.box);
  }
  texts.insert(texts.end(), ann.text_regions.begin(), ann.text_regions.end());

  FeatureVector vec;
  vec.schema_fingerprint = schema.fingerprint();
  vec.values.assign(schema.size(), 0.0);
  auto& v = vec.values;
  std::size_t at = 0;

  const auto person = dominant_person(ann);
  const auto article = dominant_article(ann);
  const auto face = dominant_of(faces);
  const auto text = dominant_of(texts);
  put_box(v, at, person, w, h);
  put_box(v, at + 4, face, w, h);
  put_box(v, at + 8, article ? std::optional<BBox>(article->box) : std::nullopt, w, h);
  put_box(v, at + 12, text, w, h);
  at += 16;

  const double canvas = w * h;
  v[at++] = person ? clamp01(clip(*person, w, h).area() / canvas) : 0.0;
  v[at++] = article ? clamp01(clip(article->box, w, h).area() / canvas) : 0.0;
  {
    std::vector<BBox> clipped;
    for (const auto& t : texts) clipped.push_back(clip(t, w, h));
    v[at++] = clamp01(union_area(clipped) / canvas);
  }

  v[at++] = ann.count_faces(Gender::female);
  v[at++] = ann.count_faces(Gender::male);
  v[at++] = static_cast<double>(std::max(ann.persons.size(), ann.faces.size()));

  for (const auto c : kAllCategories) {
    const bool present = std::any_of(ann.articles.begin(), ann.articles.end(),
                                     [c](const ArticleAnnotation& a) { return a.category == c; });
    v[at++] = present ? 1.0 : 0.0;
  }
  v[at++] = ann.scene.environment == Environment::outdoor ? 1.0 : 0.0;

  for (const auto& label : schema.scene_categories()) {
    v[at++] = !label.empty() && ann.scene.categories.contains(label) ? 1.0 : 0.0;
  }
  for (const auto& label : schema.scene_attributes()) {
    v[at++] = !label.empty() && ann.scene.attributes.contains(label) ? 1.0 : 0.0;
  }

  v[at++] = covered_fraction(faces, texts);
  v[at++] = covered_fraction(ann.persons, texts);
  v[at++] = covered_fraction(articles, texts);

  for (const auto& t : texts) {
    const bool right = t.center_x() >= w / 2.0;
    const bool bottom = t.center_y() >= h / 2.0;
    v[at + (bottom ? 2 : 0) + (right ? 1 : 0)] = 1.0;
  }
  at += 4;

  if (at != schema.size()) throw DataError("schema", "slot count does not match the extractor");
  return vec;
}

FeatureVector attach_external(FeatureVector vec, std::optional<std::span<const double>> vgg,
                              std::optional<double> nima) {
  if (vgg) {
    if (vgg->size() != kVggDimension) {
      throw DataError("vgg", "expected " + std::to_string(kVggDimension) + " values, got " +
                                 std::to_string(vgg->size()));
    }
    if (!std::all_of(vgg->begin(), vgg->end(), [](double x) { return std::isfinite(x); })) {
      throw DataError("vgg", "non-finite value");
    }
    vec.vgg = std::vector<double>(vgg->begin(), vgg->end());
  }
  if (nima) {
    if (!std::isfinite(*nima)) throw DataError("nima", "non-finite score");
    vec.nima = *nima;
  }
  return vec;
}

std::map<std::string, ExternalFeatures> parse_external_sidecar(std::string_view json_text) {
  const json doc = detail::parse_json(json_text, "external");
  if (!doc.is_object()) throw DataError("external", "expected an object keyed by banner id");
  std::map<std::string, ExternalFeatures> out;
  for (const auto& [id, rec] : doc.items()) {
    ExternalFeatures ext;
    if (const json* vgg = detail::optional_field(rec, "vgg")) {
      const auto path = id + ".vgg";
      const auto& arr = detail::as_array(*vgg, path);
      std::vector<double> values;
      values.reserve(arr.size());
      for (std::size_t i = 0; i < arr.size(); ++i) values.push_back(detail::as_number(arr[i], detail::index_path(path, i)));
      if (values.size() != kVggDimension) throw DataError(path, "expected 4096 values");
      ext.vgg = std::move(values);
    }
    if (const json* nima = detail::optional_field(rec, "nima")) ext.nima = detail::as_number(*nima, id + ".nima");
    out.emplace(id, std::move(ext));
  }
  return out;
}

std::string feature_matrix_csv(const FeatureSchema& schema, std::span<const FeatureRow> rows) {
  const bool has_vgg = !rows.empty() && rows.front().vector.vgg.has_value();
  const bool has_nima = !rows.empty() && rows.front().vector.nima.has_value();
  const auto expected = dense_fingerprint(schema.fingerprint(), has_vgg, has_nima);
  std::string out = "banner_id";
  for (const auto& n : dense_names(schema, has_vgg, has_nima)) out += "," + n;
  out += "\n";
  for (const auto& row : rows) {
    if (row.vector.fingerprint() != expected) throw DataError(row.banner_id, "feature vector does not match schema");
    out += row.banner_id;
    for (const double x : row.vector.dense()) out += "," + format_number(x);
    out += "\n";
  }
  return out;
}

}  // namespace bannerforge
