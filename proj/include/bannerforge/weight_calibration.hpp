#pragma once

/// @file weight_calibration.hpp
/// Fits energy-term weights from historical banners: CTR is regressed on the
/// standardized term scores, and each coefficient becomes a penalty weight
/// w_i proportional to max(-beta_i, 0), rescaled to mean 1 and floored.

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bannerforge/layout_energy.hpp"

namespace bannerforge {

struct HistoricalBannerRecord {
  std::string banner_id;
  double e_align = 0.0;
  double e_overlap = 0.0;
  double e_dist = 0.0;
  double e_sym = 0.0;
  double ctr = 0.0;

  [[nodiscard]] std::array<double, 4> terms() const { return {e_align, e_overlap, e_dist, e_sym}; }
};

struct CalibrationResult {
  EnergyWeights weights;
  std::array<double, 4> coefficients{};  ///< OLS betas on standardized terms (align, overlap, dist, sym)
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n_records = 0;
};

inline constexpr double kWeightFloor = 0.01;
inline constexpr std::size_t kMinCalibrationRecords = 8;

/// Maps standardized coefficients to weights: the positive part of -beta,
/// scaled so the weights average 1 once every weight is raised to at least
/// `floor`. All-zero input gives floor everywhere.
[[nodiscard]] EnergyWeights weights_from_coefficients(const std::array<double, 4>& beta,
                                                      double floor = kWeightFloor);

/// Throws DataError for fewer than 8 records, non-finite inputs, or a
/// rank-deficient design (e.g. a constant term column). A constant CTR is
/// not an error: every beta is 0, weights sit at the floor, r_squared = 0.
[[nodiscard]] CalibrationResult fit_weights(std::span<const HistoricalBannerRecord> records);

/// CSV columns: banner_id,e_align,e_overlap,e_dist,e_sym,ctr (header required).
[[nodiscard]] std::vector<HistoricalBannerRecord> parse_records_csv(std::string_view text);
[[nodiscard]] std::string records_to_csv(std::span<const HistoricalBannerRecord> records);

}  // namespace bannerforge
