#pragma once

/// @file ctr_ranker.hpp
/// CTR prediction over banner feature vectors: logistic regression, CART
/// decision tree and random forest, trained with click-balanced sample
/// weights, plus ranking, importance and offline evaluation.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bannerforge/features.hpp"

namespace bannerforge {

struct DatasetRow {
  std::string banner_id;
  std::vector<double> values;
  int is_clicked = 0;
  double ctr = 0.0;
  std::optional<long long> impressions;
  std::optional<long long> clicks;
};

struct Dataset {
  std::vector<std::string> feature_names;
  std::uint64_t fingerprint = 0;  ///< names_fingerprint(feature_names)
  std::vector<DatasetRow> rows;

  [[nodiscard]] std::size_t size() const { return rows.size(); }
  [[nodiscard]] std::size_t n_features() const { return feature_names.size(); }
  [[nodiscard]] std::vector<int> labels() const;
  [[nodiscard]] std::vector<double> ctrs() const;
  /// Throws DataError on ragged rows, non-finite values, ctr outside [0,1],
  /// clicks > impressions, or a fingerprint that disagrees with the names.
  void validate() const;
};

/// Joins a feature matrix (banner_id + named columns) with labels on
/// banner_id. Labels carry either impressions,clicks (ctr = clicks /
/// impressions, is_clicked = clicks > 0) or is_clicked with an optional ctr
/// column (defaulting to is_clicked). Row order follows the feature matrix.
[[nodiscard]] Dataset load_dataset(std::string_view features_csv, std::string_view labels_csv);
[[nodiscard]] std::string dataset_features_csv(const Dataset& ds);
/// banner_id,is_clicked,ctr plus impressions,clicks when every row has them.
[[nodiscard]] std::string dataset_labels_csv(const Dataset& ds);

/// Seeded uniform shuffle, then the first round(n * train_fraction) rows
/// train. Throws std::invalid_argument if either side would be empty.
[[nodiscard]] std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed);

enum class ModelKind { logistic_regression, decision_tree, random_forest };
enum class ClassWeightMode { balanced, none };

std::string_view to_string(ModelKind k);
std::optional<ModelKind> parse_model_kind(std::string_view s);

struct LogisticParams {
  double learning_rate = 0.1;
  double l2 = 1e-4;
  int max_epochs = 2000;
  double tolerance = 1e-6;  ///< stop when the largest gradient component falls below this
};

struct TreeParams {
  int max_depth = 8;
  int min_samples_split = 10;
};

struct ForestParams {
  int n_trees = 100;
  int features_per_split = 0;  ///< 0 means round(sqrt(feature count))
  bool bootstrap = true;
};

struct ModelSpec {
  ModelKind kind = ModelKind::random_forest;
  LogisticParams logistic;
  TreeParams tree;
  ForestParams forest;
  ClassWeightMode class_weight = ClassWeightMode::balanced;
  std::uint64_t seed = 42;

  /// Throws ConfigError.
  void validate(std::size_t n_features) const;
};

/// Flat binary tree; node 0 is the root. Leaves have feature == -1.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;  ///< go left when value <= threshold
  int left = -1;
  int right = -1;
  double value = 0.0;  ///< weighted positive fraction of the node's training samples
  double weight = 0.0;
  double impurity_decrease = 0.0;  ///< weighted Gini decrease of this split
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  [[nodiscard]] double predict(std::span<const double> x) const;
  [[nodiscard]] int depth() const;
};

struct LogisticModel {
  std::vector<double> mean;
  std::vector<double> scale;
  std::vector<double> weights;  ///< in standardized space
  double bias = 0.0;
  int epochs_run = 0;
};

struct TrainedModel {
  ModelKind kind = ModelKind::logistic_regression;
  ModelSpec spec;
  std::vector<std::string> feature_names;
  std::uint64_t fingerprint = 0;
  std::size_t n_train = 0;
  LogisticModel logistic;
  std::vector<DecisionTree> trees;  ///< one for decision_tree, n_trees for random_forest
};

/// Per-row weights multiply the class weights. Throws std::invalid_argument
/// for single-class data or bad sample weights, DataError for non-finite
/// features, ConfigError for a bad spec.
[[nodiscard]] TrainedModel train(const Dataset& ds, const ModelSpec& spec,
                                 std::optional<std::span<const double>> sample_weights = std::nullopt);

/// Score in [0, 1]. The span overload trusts the caller on feature order.
[[nodiscard]] double predict_ctr(const TrainedModel& model, std::span<const double> x);
/// Throws DataError when the vector's fingerprint differs from the model's.
[[nodiscard]] double predict_ctr(const TrainedModel& model, const FeatureVector& vec);

/// Ids by descending score, ties by ascending id.
[[nodiscard]] std::vector<std::string> rank_by_score(std::span<const std::string> ids, std::span<const double> scores);
[[nodiscard]] std::vector<std::string> rank(const TrainedModel& model,
                                            std::span<const std::pair<std::string, FeatureVector>> items);

/// Normalized Gini decrease (trees, forests) or normalized |weight| on
/// standardized features (logistic regression), sorted descending with
/// ties in feature order.
[[nodiscard]] std::vector<std::pair<std::string, double>> feature_importance(const TrainedModel& model);

struct EvalReport {
  std::string model_kind;
  double auc = 0.0;
  double ndcg = 0.0;
  std::size_t n_test = 0;
  std::size_t n_positive = 0;
  std::size_t n_train = 0;
  std::string fingerprint;
  std::vector<std::pair<std::string, double>> top_features;
};

/// AUC against is_clicked, NDCG against ctr. Throws std::invalid_argument
/// for an empty test set or a metric precondition failure, DataError on a
/// feature-set mismatch.
[[nodiscard]] EvalReport evaluate(const TrainedModel& model, const Dataset& test);

[[nodiscard]] std::string serialize_model(const TrainedModel& model);
[[nodiscard]] TrainedModel parse_model(std::string_view json_text);
[[nodiscard]] std::string serialize_eval_report(const EvalReport& report);
[[nodiscard]] ModelSpec parse_model_spec(std::string_view json_text);
[[nodiscard]] std::string serialize_model_spec(const ModelSpec& spec);

}  // namespace bannerforge
