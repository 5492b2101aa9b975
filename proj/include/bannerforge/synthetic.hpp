#pragma once

/// @file synthetic.hpp
/// Seeded generators for test and demo data: annotated banners with a
/// planted click model, historical energy/CTR records with a known linear
/// dependence, and the small on-disk demo corpus.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bannerforge/annotation.hpp"
#include "bannerforge/ctr_ranker.hpp"
#include "bannerforge/features.hpp"
#include "bannerforge/layout_energy.hpp"
#include "bannerforge/weight_calibration.hpp"

namespace bannerforge {

/// Slope on the standardized planted feature used for "strong signal" runs.
inline constexpr double kStrongSignal = 6.0;
inline constexpr const char* kPlantedFeature = "area_person";

struct SyntheticSpec {
  std::size_t n = 5000;
  /// Click logit = strength * z + logit(base_rate), z the standardized
  /// planted feature. 0 makes clicks independent of every feature.
  double strength = kStrongSignal;
  double base_rate = 0.3;
  /// Labels are 1 exactly when the click probability is >= 0.5.
  bool zero_noise = false;
  std::uint64_t seed = 1;
  std::size_t k_scene = kDefaultSceneSlots;
  int canvas_width = 400;
  int canvas_height = 200;
};

struct SyntheticData {
  std::vector<ImageAnnotation> annotations;
  std::vector<Layout> layouts;
  FeatureSchema schema;
  Dataset dataset;
  std::vector<double> click_probability;
  /// AUC of the true click probability: exact against the labels in
  /// zero-noise mode, its expectation over label draws otherwise.
  double bayes_auc = 0.5;
  std::string planted_feature;
};

[[nodiscard]] SyntheticData generate_synthetic(const SyntheticSpec& spec);

/// Ratio-of-expectations AUC of scores p when item i is positive with
/// probability p_i independently: sum over i != j of p_i (1 - p_j) credit
/// (1 for p_i > p_j, 1/2 for ties), over sum of p_i (1 - p_j).
[[nodiscard]] double expected_auc(std::span<const double> p);

struct RecordSpec {
  std::size_t n = 500;
  /// ctr = base_ctr - sum c_i * e_i + N(0, sigma); order align, overlap, dist, sym.
  std::array<double, 4> coefficients{0.01, 0.06, 0.02, 0.01};
  double base_ctr = 0.2;
  double sigma = 0.001;
  std::uint64_t seed = 1;
};

[[nodiscard]] std::vector<HistoricalBannerRecord> generate_records(const RecordSpec& spec);

/// Writes annotations/, images/, logos/, library.json, pipeline.json,
/// layout_problem.json, schema.json and model.json under `dir`.
void write_demo_corpus(const std::filesystem::path& dir, std::uint64_t seed);

}  // namespace bannerforge
