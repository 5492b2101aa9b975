#pragma once

/// @file features.hpp
/// Fixed-schema banner features derived from annotation + layout, with
/// optional precomputed image embeddings and aesthetic scores appended.
///
/// Base slot groups, in order:
///   position   16  dominant person/face/article/text box, [l,t,r,b] / canvas, -1 if absent
///   area        3  dominant person, dominant article, text union; fraction of canvas
///   gender      3  women, men, total people (counts)
///   category    7  article category present (one-hot)
///   environment 1  indoor = 0, outdoor = 1
///   scene_cat   K  frequent scene categories (one-hot)
///   scene_attr  K  frequent scene attributes (one-hot)
///   overlap     3  text vs face, person, article: covered fraction of that component
///   quadrant    4  a text box center lies in TL, TR, BL, BR

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bannerforge/annotation.hpp"
#include "bannerforge/layout_energy.hpp"

namespace bannerforge {

inline constexpr std::size_t kVggDimension = 4096;
inline constexpr std::size_t kDefaultSceneSlots = 16;
inline constexpr double kAbsent = -1.0;

struct FeatureSlot {
  std::string name;
  std::string group;
  friend bool operator==(const FeatureSlot&, const FeatureSlot&) = default;
};

class FeatureSchema {
 public:
  FeatureSchema() = default;
  FeatureSchema(std::vector<std::string> scene_categories, std::vector<std::string> scene_attributes);

  [[nodiscard]] const std::vector<FeatureSlot>& slots() const { return slots_; }
  [[nodiscard]] std::size_t size() const { return slots_.size(); }
  /// Selected labels; reserved padding slots are empty strings.
  [[nodiscard]] const std::vector<std::string>& scene_categories() const { return scene_categories_; }
  [[nodiscard]] const std::vector<std::string>& scene_attributes() const { return scene_attributes_; }
  [[nodiscard]] std::uint64_t fingerprint() const { return fingerprint_; }
  [[nodiscard]] std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;

 private:
  std::vector<std::string> scene_categories_;
  std::vector<std::string> scene_attributes_;
  std::vector<FeatureSlot> slots_;
  std::uint64_t fingerprint_ = 0;
};

/// Picks the k most frequent scene categories and attributes across the
/// corpus (ties: lexicographic), padding with reserved always-zero slots.
[[nodiscard]] FeatureSchema build_schema(std::span<const ImageAnnotation> corpus,
                                         std::size_t k_scene = kDefaultSceneSlots);

[[nodiscard]] std::string serialize_schema(const FeatureSchema& schema);
[[nodiscard]] FeatureSchema parse_schema(std::string_view json_text);

struct FeatureVector {
  std::uint64_t schema_fingerprint = 0;
  std::vector<double> values;  ///< base slots
  std::optional<std::vector<double>> vgg;
  std::optional<double> nima;

  /// Base values followed by vgg and nima when present.
  [[nodiscard]] std::vector<double> dense() const;
  /// Identifies schema plus which external blocks are attached.
  [[nodiscard]] std::uint64_t fingerprint() const;
};

/// Order-sensitive hash of slot names; continuing from a previous value
/// extends the list. Schema and dense fingerprints are both defined this way,
/// so a feature-matrix CSV header identifies the same feature set.
[[nodiscard]] std::uint64_t names_fingerprint(std::span<const std::string> names, std::uint64_t start);
[[nodiscard]] std::uint64_t names_fingerprint(std::span<const std::string> names);

/// Names matching FeatureVector::dense() for this schema and attachment set.
[[nodiscard]] std::vector<std::string> dense_names(const FeatureSchema& schema, bool has_vgg, bool has_nima);
[[nodiscard]] std::uint64_t dense_fingerprint(std::uint64_t schema_fingerprint, bool has_vgg, bool has_nima);

/// Text components are the layout's text elements plus the annotation's
/// text regions. `ann` must be in the layout's canvas coordinates.
[[nodiscard]] FeatureVector extract(const ImageAnnotation& ann, const Layout& layout, const FeatureSchema& schema);

/// Throws DataError when the embedding is not 4096 long or the score is not finite.
[[nodiscard]] FeatureVector attach_external(FeatureVector vec, std::optional<std::span<const double>> vgg,
                                            std::optional<double> nima);

struct ExternalFeatures {
  std::optional<std::vector<double>> vgg;
  std::optional<double> nima;
};

/// Sidecar: {"<banner_id>": {"vgg": [4096 floats], "nima": float}, ...}
[[nodiscard]] std::map<std::string, ExternalFeatures> parse_external_sidecar(std::string_view json_text);

struct FeatureRow {
  std::string banner_id;
  FeatureVector vector;
};

/// CSV with header banner_id,<dense slot names>.
[[nodiscard]] std::string feature_matrix_csv(const FeatureSchema& schema, std::span<const FeatureRow> rows);

}  // namespace bannerforge
