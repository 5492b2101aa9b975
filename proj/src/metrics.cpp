#include "bannerforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace bannerforge {

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (const int y : labels) {
    if (y != 0 && y != 1) throw std::invalid_argument("auc: labels must be 0 or 1");
    n_pos += static_cast<std::size_t>(y);
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("auc: both classes must be present");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Ranks are 1-based; a tie group spanning positions i..j-1 shares (i + j + 1) / 2.
  // Doubled to keep the sum in integers.
  long double pos_rank_sum2 = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const auto rank2 = static_cast<long double>(i + j + 1);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) pos_rank_sum2 += rank2;
    }
    i = j;
  }
  const long double u = pos_rank_sum2 / 2 - static_cast<long double>(n_pos) * (n_pos + 1) / 2;
  return static_cast<double>(u / (static_cast<long double>(n_pos) * n_neg));
}

namespace {

double dcg(std::span<const double> relevances, const std::vector<std::size_t>& order) {
  double total = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    total += relevances[order[i]] / std::log2(static_cast<double>(i) + 2.0);
  }
  return total;
}

}  // namespace

double ndcg(std::span<const double> predicted_scores, std::span<const double> relevances) {
  if (predicted_scores.size() != relevances.size()) throw std::invalid_argument("ndcg: length mismatch");
  if (std::none_of(relevances.begin(), relevances.end(), [](double r) { return r > 0.0; })) {
    throw std::invalid_argument("ndcg: all relevances are zero");
  }
  std::vector<std::size_t> predicted(predicted_scores.size());
  std::iota(predicted.begin(), predicted.end(), 0);
  std::stable_sort(predicted.begin(), predicted.end(),
                   [&](std::size_t a, std::size_t b) { return predicted_scores[a] > predicted_scores[b]; });
  std::vector<std::size_t> ideal(relevances.size());
  std::iota(ideal.begin(), ideal.end(), 0);
  std::stable_sort(ideal.begin(), ideal.end(), [&](std::size_t a, std::size_t b) { return relevances[a] > relevances[b]; });
  return dcg(relevances, predicted) / dcg(relevances, ideal);
}

}  // namespace bannerforge
