#pragma once

/// @file annotation.hpp
/// Structured per-image metadata (people, faces, articles, scene, text) as
/// produced by upstream detectors, plus catalog filtering.

#include <array>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bannerforge/geometry.hpp"

namespace bannerforge {

enum class ArticleCategory { topwear, bottomwear, shoes, watches, bags, headgear, other };
inline constexpr std::array<ArticleCategory, 7> kAllCategories = {
    ArticleCategory::topwear, ArticleCategory::bottomwear, ArticleCategory::shoes,
    ArticleCategory::watches, ArticleCategory::bags,       ArticleCategory::headgear,
    ArticleCategory::other};

enum class Gender { male, female, unknown };
enum class Environment { indoor, outdoor };

std::string_view to_string(ArticleCategory c);
std::string_view to_string(Gender g);
std::string_view to_string(Environment e);
std::optional<ArticleCategory> parse_category(std::string_view s);
std::optional<Gender> parse_gender(std::string_view s);
std::optional<Environment> parse_environment(std::string_view s);

struct ArticleAnnotation {
  ArticleCategory category = ArticleCategory::other;
  BBox box;
  double confidence = 1.0;
  friend bool operator==(const ArticleAnnotation&, const ArticleAnnotation&) = default;
};

struct FaceAnnotation {
  BBox box;
  Gender gender = Gender::unknown;
  friend bool operator==(const FaceAnnotation&, const FaceAnnotation&) = default;
};

struct SceneInfo {
  Environment environment = Environment::indoor;
  std::set<std::string> categories;
  std::set<std::string> attributes;
  friend bool operator==(const SceneInfo&, const SceneInfo&) = default;
};

struct ImageAnnotation {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::string brand;
  std::string season;
  std::vector<BBox> persons;
  std::vector<FaceAnnotation> faces;
  std::vector<ArticleAnnotation> articles;
  SceneInfo scene;
  std::vector<BBox> text_regions;

  [[nodiscard]] int count_faces(Gender g) const;
  friend bool operator==(const ImageAnnotation&, const ImageAnnotation&) = default;
};

struct Violation {
  enum class Kind { out_of_bounds, degenerate_box, bad_value, missing_value };
  Kind kind;
  std::string path;  ///< e.g. "faces[0].box"
  std::string message;
};

struct LogoEntry {
  std::string brand;
  std::string path;
};

struct CalloutEntry {
  std::string text;
  std::set<std::string> themes;
};

struct ElementLibrary {
  std::vector<LogoEntry> logos;
  std::vector<CalloutEntry> callouts;

  [[nodiscard]] const LogoEntry* logo_for(std::string_view brand) const;
  /// Callouts tagged with `theme`; all callouts when theme is empty.
  [[nodiscard]] std::vector<const CalloutEntry*> callouts_for(std::string_view theme) const;
};

inline constexpr double kDefaultMaxTextAreaFraction = 0.10;

struct FilterCriteria {
  std::optional<std::string> brand;
  std::optional<ArticleCategory> category;
  std::optional<Environment> environment;
  std::optional<Gender> required_gender;
  double max_text_area_fraction = kDefaultMaxTextAreaFraction;
};

/// Parses one annotation document. Unknown fields are ignored. Throws
/// DataError naming the offending field path.
[[nodiscard]] ImageAnnotation parse_annotation(std::string_view json_text);
[[nodiscard]] std::string serialize_annotation(const ImageAnnotation& ann);

[[nodiscard]] ElementLibrary parse_element_library(std::string_view json_text);
[[nodiscard]] std::string serialize_element_library(const ElementLibrary& lib);

/// Empty iff all annotation invariants hold.
[[nodiscard]] std::vector<Violation> validate(const ImageAnnotation& ann);
[[nodiscard]] std::vector<Violation> validate(const ElementLibrary& lib);

/// Index of the largest-area box; ties go to the lowest (y_top, x_left), then
/// to the earliest entry.
[[nodiscard]] std::optional<std::size_t> dominant_index(std::span<const BBox> boxes);
[[nodiscard]] std::optional<ArticleAnnotation> dominant_article(const ImageAnnotation& ann);
[[nodiscard]] std::optional<BBox> dominant_person(const ImageAnnotation& ann);

/// Area of the union of text regions over image area, in [0, 1].
[[nodiscard]] double text_area_fraction(const ImageAnnotation& ann);

[[nodiscard]] bool matches(const ImageAnnotation& ann, const FilterCriteria& crit);
/// image_ids of the catalog entries that pass every present criterion, in
/// catalog order.
[[nodiscard]] std::vector<std::string> filter_images(std::span<const ImageAnnotation> catalog,
                                                     const FilterCriteria& crit);

}  // namespace bannerforge
