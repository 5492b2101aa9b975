#pragma once

/// @file pipeline.hpp
/// End-to-end banner generation: filter the catalog, crop, optimize
/// layouts, composite, score, and persist banners with a manifest.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bannerforge/annotation.hpp"
#include "bannerforge/compositor.hpp"
#include "bannerforge/features.hpp"
#include "bannerforge/ga_optimizer.hpp"
#include "bannerforge/layout_energy.hpp"

namespace bannerforge {

/// Element size and size bounds as fractions of the cropped canvas.
struct ElementSizing {
  double width = 0.2;
  double height = 0.2;
  double min_width = 0.1;
  double max_width = 0.3;
  double min_height = 0.1;
  double max_height = 0.3;
};

struct PipelineConfig {
  std::filesystem::path annotations_dir;
  std::filesystem::path images_dir;
  std::filesystem::path library_path;
  std::filesystem::path output_dir;
  std::optional<std::filesystem::path> weights_path;  ///< overrides inline weights
  std::optional<std::filesystem::path> schema_path;
  std::optional<std::filesystem::path> model_path;     ///< requires schema_path
  std::optional<std::filesystem::path> external_path;  ///< VGG / NIMA sidecar keyed by banner id
  std::uint64_t seed = 7;

  FilterCriteria filter;
  std::string theme;
  double target_aspect = 2.0;
  std::size_t top_k = 3;

  ElementSizing logo{0.2, 0.2, 0.1, 0.3, 0.1, 0.3};
  ElementSizing text{0.45, 0.25, 0.3, 0.6, 0.18, 0.4};
  std::size_t text_count = 1;
  EnergyWeights weights;
  GAConfig ga;
  ComposeOptions compose;

  /// Throws ConfigError.
  void validate() const;
};

/// Relative paths resolve against `base_dir` (normally the config file's directory).
/// Malformed input throws DataError; well-formed but invalid values throw ConfigError.
[[nodiscard]] PipelineConfig parse_pipeline_config(std::string_view json_text, const std::filesystem::path& base_dir);

/// {"target_aspect", "gradient", "gradient_strength", "min_font", "alignment"};
/// missing keys keep the defaults.
[[nodiscard]] ComposeOptions parse_compose_options(std::string_view json_text);
[[nodiscard]] std::string serialize_compose_options(const ComposeOptions& options);

/// Persons (focus = largest face whose center they contain) and articles as
/// fixed layout elements.
[[nodiscard]] std::vector<ElementBox> fixed_elements(const ImageAnnotation& ann);

/// GA problem for one cropped canvas under the config's sizing and weights.
[[nodiscard]] LayoutProblem make_layout_problem(const ImageAnnotation& cropped, const PipelineConfig& cfg);

struct BannerEntry {
  std::string id;  ///< <image_id>_L<rank>
  std::string image_id;
  std::size_t layout_rank = 0;
  Layout layout;
  EnergyBreakdown energy;
  std::optional<double> predicted_ctr;
  std::string image_file;    ///< relative to the output directory
  std::string sidecar_file;  ///< relative to the output directory
  std::string brand;
  std::string logo_file;
  std::vector<std::string> callouts;
  PixelRect crop;
  bool roi_clipped = false;
};

struct BannerFailure {
  std::string image_id;
  std::string stage;
  std::string error;
};

struct BannerManifest {
  std::uint64_t seed = 0;
  bool ranked_by_ctr = false;
  std::size_t images_considered = 0;
  std::vector<BannerEntry> banners;  ///< ctr descending, else energy ascending; ties by id
  std::vector<BannerFailure> failures;
};

/// Writes banners/<id>.png, banners/<id>.json and manifest.json (plus
/// features.csv when a schema is configured) under the output directory.
/// Throws DataError/ConfigError for run-level problems (unreadable inputs,
/// empty filter result, missing logo for the requested brand, no callout
/// for the theme); per-image problems become failure entries.
[[nodiscard]] BannerManifest run_pipeline(const PipelineConfig& cfg);

[[nodiscard]] std::string serialize_manifest(const BannerManifest& manifest);

/// Annotations in a directory (*.json, sorted by file name). Unparseable
/// files are reported through `failures` when given, else rethrown.
[[nodiscard]] std::vector<ImageAnnotation> load_annotations(const std::filesystem::path& dir,
                                                            std::vector<BannerFailure>* failures = nullptr);

/// Feature rows for every banner of a pipeline output, read back from the
/// sidecars listed in its manifest.
[[nodiscard]] std::vector<FeatureRow> features_from_output(const std::filesystem::path& output_dir,
                                                           const FeatureSchema& schema,
                                                           const std::optional<std::filesystem::path>& external);

}  // namespace bannerforge
