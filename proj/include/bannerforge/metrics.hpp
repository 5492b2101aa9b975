#pragma once

/// @file metrics.hpp
/// Ranking metrics for CTR models.

#include <span>

namespace bannerforge {

/// Mann-Whitney AUC by rank summation with average ranks for ties.
/// Throws std::invalid_argument on length mismatch, labels outside {0,1},
/// or when either class is absent.
[[nodiscard]] double auc(std::span<const double> scores, std::span<const int> labels);

/// NDCG with linear gain and log2(i + 1) discount over the full list; the
/// predicted order breaks score ties by index. Throws std::invalid_argument
/// when every relevance is zero or lengths differ.
[[nodiscard]] double ndcg(std::span<const double> predicted_scores, std::span<const double> relevances);

}  // namespace bannerforge
