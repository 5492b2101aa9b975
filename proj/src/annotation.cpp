#include "bannerforge/annotation.hpp"

#include <algorithm>
#include <map>

#include "json_util.hpp"

namespace bannerforge {

using detail::json;

namespace {

constexpr std::array<std::string_view, 7> kCategoryNames = {
    "topwear", "bottomwear", "shoes", "watches", "bags", "headgear", "other"};

std::set<std::string> string_set(const json& v, const std::string& path) {
  std::set<std::string> out;
  const auto& arr = detail::as_array(v, path);
  for (std::size_t i = 0; i < arr.size(); ++i) out.insert(detail::as_string(arr[i], detail::index_path(path, i)));
  return out;
}

std::vector<BBox> box_list(const json& v, const std::string& path) {
  std::vector<BBox> out;
  const auto& arr = detail::as_array(v, path);
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(detail::as_box(arr[i], detail::index_path(path, i)));
  return out;
}

void check_box(const BBox& b, int width, int height, const std::string& path, std::vector<Violation>& out) {
  if (!(b.x_left < b.x_right) || !(b.y_top < b.y_bottom)) {
    out.push_back({Violation::Kind::degenerate_box, path, "box has zero or negative extent"});
  }
  if (b.x_left < 0 || b.y_top < 0 || b.x_right > width || b.y_bottom > height) {
    out.push_back({Violation::Kind::out_of_bounds, path,
                   "box lies outside [0," + std::to_string(width) + "]x[0," + std::to_string(height) + "]"});
  }
}

}  // namespace

std::string_view to_string(ArticleCategory c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

std::string_view to_string(Gender g) {
  switch (g) {
    case Gender::male: return "male";
    case Gender::female: return "female";
    case Gender::unknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(Environment e) { return e == Environment::indoor ? "indoor" : "outdoor"; }

std::optional<ArticleCategory> parse_category(std::string_view s) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == s) return static_cast<ArticleCategory>(i);
  }
  return std::nullopt;
}

std::optional<Gender> parse_gender(std::string_view s) {
  if (s == "male") return Gender::male;
  if (s == "female") return Gender::female;
  if (s == "unknown") return Gender::unknown;
  return std::nullopt;
}

std::optional<Environment> parse_environment(std::string_view s) {
  if (s == "indoor") return Environment::indoor;
  if (s == "outdoor") return Environment::outdoor;
  return std::nullopt;
}

int ImageAnnotation::count_faces(Gender g) const {
  return static_cast<int>(std::count_if(faces.begin(), faces.end(), [g](const auto& f) { return f.gender == g; }));
}

ImageAnnotation parse_annotation(std::string_view json_text) {
  const json doc = detail::parse_json(json_text, "");
  if (!doc.is_object()) throw DataError("", "annotation must be a JSON object");

  ImageAnnotation ann;
  ann.image_id = detail::as_string(detail::require(doc, "image_id", ""), "image_id");
  ann.width = static_cast<int>(detail::as_integer(detail::require(doc, "width", ""), "width"));
  ann.height = static_cast<int>(detail::as_integer(detail::require(doc, "height", ""), "height"));
  ann.brand = detail::as_string(detail::require(doc, "brand", ""), "brand");
  ann.season = detail::as_string(detail::require(doc, "season", ""), "season");
  ann.persons = box_list(detail::require(doc, "persons", ""), "persons");
  ann.text_regions = box_list(detail::require(doc, "text_regions", ""), "text_regions");

  const auto& faces = detail::as_array(detail::require(doc, "faces", ""), "faces");
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const std::string path = detail::index_path("faces", i);
    FaceAnnotation face;
    face.box = detail::as_box(detail::require(faces[i], "box", path), path + ".box");
    const std::string g = detail::as_string(detail::require(faces[i], "gender", path), path + ".gender");
    const auto gender = parse_gender(g);
    if (!gender) throw DataError(path + ".gender", "unknown gender '" + g + "'");
    face.gender = *gender;
    ann.faces.push_back(face);
  }

  const auto& articles = detail::as_array(detail::require(doc, "articles", ""), "articles");
  for (std::size_t i = 0; i < articles.size(); ++i) {
    const std::string path = detail::index_path("articles", i);
    ArticleAnnotation art;
    const std::string c = detail::as_string(detail::require(articles[i], "category", path), path + ".category");
    const auto cat = parse_category(c);
    if (!cat) throw DataError(path + ".category", "unknown category '" + c + "'");
    art.category = *cat;
    art.box = detail::as_box(detail::require(articles[i], "box", path), path + ".box");
    art.confidence = detail::as_number(detail::require(articles[i], "confidence", path), path + ".confidence");
    ann.articles.push_back(art);
  }

  const json& scene = detail::require(doc, "scene", "");
  const std::string env = detail::as_string(detail::require(scene, "environment", "scene"), "scene.environment");
  const auto environment = parse_environment(env);
  if (!environment) throw DataError("scene.environment", "expected indoor|outdoor, got '" + env + "'");
  ann.scene.environment = *environment;
  ann.scene.categories = string_set(detail::require(scene, "categories", "scene"), "scene.categories");
  ann.scene.attributes = string_set(detail::require(scene, "attributes", "scene"), "scene.attributes");
  return ann;
}

std::string serialize_annotation(const ImageAnnotation& ann) {
  json doc;
  doc["image_id"] = ann.image_id;
  doc["width"] = ann.width;
  doc["height"] = ann.height;
  doc["brand"] = ann.brand;
  doc["season"] = ann.season;
  doc["persons"] = json::array();
  for (const auto& b : ann.persons) doc["persons"].push_back(detail::box_json(b));
  doc["faces"] = json::array();
  for (const auto& f : ann.faces) {
    doc["faces"].push_back({{"box", detail::box_json(f.box)}, {"gender", to_string(f.gender)}});
  }
  doc["articles"] = json::array();
  for (const auto& a : ann.articles) {
    doc["articles"].push_back(
        {{"category", to_string(a.category)}, {"box", detail::box_json(a.box)}, {"confidence", a.confidence}});
  }
  doc["scene"] = {{"environment", to_string(ann.scene.environment)},
                  {"categories", ann.scene.categories},
                  {"attributes", ann.scene.attributes}};
  doc["text_regions"] = json::array();
  for (const auto& b : ann.text_regions) doc["text_regions"].push_back(detail::box_json(b));
  return doc.dump(2);
}

ElementLibrary parse_element_library(std::string_view json_text) {
  const json doc = detail::parse_json(json_text, "");
  ElementLibrary lib;
  const auto& logos = detail::as_array(detail::require(doc, "logos", ""), "logos");
  for (std::size_t i = 0; i < logos.size(); ++i) {
    const std::string path = detail::index_path("logos", i);
    lib.logos.push_back({detail::as_string(detail::require(logos[i], "brand", path), path + ".brand"),
                         detail::as_string(detail::require(logos[i], "path", path), path + ".path")});
  }
  const auto& callouts = detail::as_array(detail::require(doc, "callouts", ""), "callouts");
  for (std::size_t i = 0; i < callouts.size(); ++i) {
    const std::string path = detail::index_path("callouts", i);
    CalloutEntry c;
    c.text = detail::as_string(detail::require(callouts[i], "text", path), path + ".text");
    if (const json* t = detail::optional_field(callouts[i], "themes")) c.themes = string_set(*t, path + ".themes");
    lib.callouts.push_back(std::move(c));
  }
  return lib;
}

std::string serialize_element_library(const ElementLibrary& lib) {
  json doc;
  doc["logos"] = json::array();
  for (const auto& l : lib.logos) doc["logos"].push_back({{"brand", l.brand}, {"path", l.path}});
  doc["callouts"] = json::array();
  for (const auto& c : lib.callouts) doc["callouts"].push_back({{"text", c.text}, {"themes", c.themes}});
  return doc.dump(2);
}

const LogoEntry* ElementLibrary::logo_for(std::string_view brand) const {
  const auto it = std::find_if(logos.begin(), logos.end(), [&](const auto& l) { return l.brand == brand; });
  return it == logos.end() ? nullptr : &*it;
}

std::vector<const CalloutEntry*> ElementLibrary::callouts_for(std::string_view theme) const {
  std::vector<const CalloutEntry*> out;
  for (const auto& c : callouts) {
    if (theme.empty() || c.themes.contains(std::string(theme))) out.push_back(&c);
  }
  return out;
}

std::vector<Violation> validate(const ImageAnnotation& ann) {
  std::vector<Violation> out;
  if (ann.image_id.empty()) out.push_back({Violation::Kind::missing_value, "image_id", "image_id is empty"});
  if (ann.width <= 0) out.push_back({Violation::Kind::bad_value, "width", "width must be positive"});
  if (ann.height <= 0) out.push_back({Violation::Kind::bad_value, "height", "height must be positive"});
  for (std::size_t i = 0; i < ann.persons.size(); ++i) {
    check_box(ann.persons[i], ann.width, ann.height, detail::index_path("persons", i), out);
  }
  for (std::size_t i = 0; i < ann.faces.size(); ++i) {
    check_box(ann.faces[i].box, ann.width, ann.height, detail::index_path("faces", i) + ".box", out);
  }
  for (std::size_t i = 0; i < ann.articles.size(); ++i) {
    const std::string path = detail::index_path("articles", i);
    check_box(ann.articles[i].box, ann.width, ann.height, path + ".box", out);
    const double c = ann.articles[i].confidence;
    if (!(c >= 0.0 && c <= 1.0)) {
      out.push_back({Violation::Kind::bad_value, path + ".confidence", "confidence outside [0,1]"});
    }
  }
  for (std::size_t i = 0; i < ann.text_regions.size(); ++i) {
    check_box(ann.text_regions[i], ann.width, ann.height, detail::index_path("text_regions", i), out);
  }
  return out;
}

std::vector<Violation> validate(const ElementLibrary& lib) {
  std::vector<Violation> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < lib.logos.size(); ++i) {
    if (!seen.insert(lib.logos[i].brand).second) {
      out.push_back({Violation::Kind::bad_value, detail::index_path("logos", i) + ".brand",
                     "duplicate brand '" + lib.logos[i].brand + "'"});
    }
  }
  for (std::size_t i = 0; i < lib.callouts.size(); ++i) {
    if (lib.callouts[i].text.empty()) {
      out.push_back({Violation::Kind::missing_value, detail::index_path("callouts", i) + ".text", "empty callout"});
    }
  }
  return out;
}

std::optional<std::size_t> dominant_index(std::span<const BBox> boxes) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (!best) {
      best = i;
      continue;
    }
    const BBox& cur = boxes[*best];
    const BBox& cand = boxes[i];
    if (cand.area() > cur.area() ||
        (cand.area() == cur.area() &&
         std::pair(cand.y_top, cand.x_left) < std::pair(cur.y_top, cur.x_left))) {
      best = i;
    }
  }
  return best;
}

std::optional<ArticleAnnotation> dominant_article(const ImageAnnotation& ann) {
  std::vector<BBox> boxes;
  boxes.reserve(ann.articles.size());
  for (const auto& a : ann.articles) boxes.push_back(a.box);
  const auto idx = dominant_index(boxes);
  if (!idx) return std::nullopt;
  return ann.articles[*idx];
}

std::optional<BBox> dominant_person(const ImageAnnotation& ann) {
  const auto idx = dominant_index(ann.persons);
  if (!idx) return std::nullopt;
  return ann.persons[*idx];
}

double text_area_fraction(const ImageAnnotation& ann) {
  if (ann.width <= 0 || ann.height <= 0 || ann.text_regions.empty()) return 0.0;
  const BBox frame{0.0, 0.0, static_cast<double>(ann.width), static_cast<double>(ann.height)};
  std::vector<BBox> clipped;
  clipped.reserve(ann.text_regions.size());
  for (const auto& r : ann.text_regions) {
    clipped.push_back({std::max(r.x_left, frame.x_left), std::max(r.y_top, frame.y_top),
                       std::min(r.x_right, frame.x_right), std::min(r.y_bottom, frame.y_bottom)});
  }
  return std::clamp(union_area(clipped) / frame.area(), 0.0, 1.0);
}

bool matches(const ImageAnnotation& ann, const FilterCriteria& crit) {
  if (crit.brand && ann.brand != *crit.brand) return false;
  if (crit.category &&
      std::none_of(ann.articles.begin(), ann.articles.end(),
                   [&](const auto& a) { return a.category == *crit.category; })) {
    return false;
  }
  if (crit.environment && ann.scene.environment != *crit.environment) return false;
  if (crit.required_gender && ann.count_faces(*crit.required_gender) == 0) return false;
  return text_area_fraction(ann) <= crit.max_text_area_fraction;
}

std::vector<std::string> filter_images(std::span<const ImageAnnotation> catalog, const FilterCriteria& crit) {
  std::vector<std::string> out;
  for (const auto& ann : catalog) {
    if (matches(ann, crit)) out.push_back(ann.image_id);
  }
  return out;
}

}  // namespace bannerforge
