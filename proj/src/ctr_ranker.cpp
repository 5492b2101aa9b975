#include "bannerforge/ctr_ranker.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "bannerforge/csv.hpp"
#include "bannerforge/error.hpp"
#include "bannerforge/hash.hpp"
#include "bannerforge/metrics.hpp"
#include "bannerforge/random.hpp"
#include "ranker_json.hpp"

namespace bannerforge {

using detail::json;

// ---------------------------------------------------------------- dataset

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.is_clicked);
  return out;
}

std::vector<double> Dataset::ctrs() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.ctr);
  return out;
}

void Dataset::validate() const {
  if (fingerprint != names_fingerprint(feature_names)) throw DataError("dataset", "fingerprint does not match feature names");
  for (const auto& r : rows) {
    if (r.values.size() != feature_names.size()) throw DataError(r.banner_id, "feature count differs from header");
    for (std::size_t j = 0; j < r.values.size(); ++j) {
      if (!std::isfinite(r.values[j])) throw DataError(r.banner_id + "." + feature_names[j], "non-finite feature");
    }
    if (r.is_clicked != 0 && r.is_clicked != 1) throw DataError(r.banner_id + ".is_clicked", "must be 0 or 1");
    if (!(r.ctr >= 0.0 && r.ctr <= 1.0)) throw DataError(r.banner_id + ".ctr", "must lie in [0,1]");
    if (r.clicks && r.impressions && *r.clicks > *r.impressions) {
      throw DataError(r.banner_id + ".clicks", "exceeds impressions");
    }
  }
}

Dataset load_dataset(std::string_view features_csv, std::string_view labels_csv) {
  const CsvTable features = parse_csv(features_csv);
  const CsvTable labels = parse_csv(labels_csv);
  if (features.header.empty() || features.header.front() != "banner_id") {
    throw DataError("features.banner_id", "first column must be banner_id");
  }

  struct Label {
    int is_clicked = 0;
    double ctr = 0.0;
    std::optional<long long> impressions;
    std::optional<long long> clicks;
  };
  std::map<std::string, Label> by_id;
  const std::size_t id_col = labels.column("banner_id");
  const bool counts = labels.has_column("impressions") && labels.has_column("clicks");
  for (std::size_t i = 0; i < labels.rows.size(); ++i) {
    const auto& row = labels.rows[i];
    const std::size_t line = i + 2;
    Label lab;
    if (counts) {
      const double imp = parse_csv_number(row[labels.column("impressions")], line, "impressions");
      const double clk = parse_csv_number(row[labels.column("clicks")], line, "clicks");
      if (imp <= 0 || clk < 0 || imp != std::floor(imp) || clk != std::floor(clk)) {
        throw DataError("labels line " + std::to_string(line), "impressions must be a positive integer, clicks >= 0");
      }
      lab.impressions = static_cast<long long>(imp);
      lab.clicks = static_cast<long long>(clk);
      lab.ctr = clk / imp;
      lab.is_clicked = clk > 0 ? 1 : 0;
    } else {
      const double y = parse_csv_number(row[labels.column("is_clicked")], line, "is_clicked");
      if (y != 0.0 && y != 1.0) throw DataError("labels line " + std::to_string(line) + ".is_clicked", "must be 0 or 1");
      lab.is_clicked = static_cast<int>(y);
      lab.ctr = labels.has_column("ctr") ? parse_csv_number(row[labels.column("ctr")], line, "ctr") : y;
    }
    if (!by_id.emplace(row[id_col], lab).second) throw DataError(row[id_col], "duplicate banner_id in labels");
  }

  Dataset ds;
  ds.feature_names.assign(features.header.begin() + 1, features.header.end());
  ds.fingerprint = names_fingerprint(ds.feature_names);
  std::map<std::string, bool> seen;
  for (std::size_t i = 0; i < features.rows.size(); ++i) {
    const auto& row = features.rows[i];
    DatasetRow r;
    r.banner_id = row[0];
    if (!seen.emplace(r.banner_id, true).second) throw DataError(r.banner_id, "duplicate banner_id in features");
    const auto it = by_id.find(r.banner_id);
    if (it == by_id.end()) throw DataError(r.banner_id, "no label row");
    for (std::size_t j = 1; j < row.size(); ++j) r.values.push_back(parse_csv_number(row[j], i + 2, features.header[j]));
    r.is_clicked = it->second.is_clicked;
    r.ctr = it->second.ctr;
    r.impressions = it->second.impressions;
    r.clicks = it->second.clicks;
    ds.rows.push_back(std::move(r));
  }
  ds.validate();
  return ds;
}

std::string dataset_features_csv(const Dataset& ds) {
  std::string out = "banner_id";
  for (const auto& n : ds.feature_names) out += "," + n;
  out += "\n";
  for (const auto& r : ds.rows) {
    out += r.banner_id;
    for (const double v : r.values) out += "," + format_number(v);
    out += "\n";
  }
  return out;
}

std::string dataset_labels_csv(const Dataset& ds) {
  const bool counts = !ds.rows.empty() && std::all_of(ds.rows.begin(), ds.rows.end(), [](const DatasetRow& r) {
    return r.impressions.has_value() && r.clicks.has_value();
  });
  std::string out = counts ? "banner_id,is_clicked,ctr,impressions,clicks\n" : "banner_id,is_clicked,ctr\n";
  for (const auto& r : ds.rows) {
    out += r.banner_id + "," + std::to_string(r.is_clicked) + "," + format_number(r.ctr);
    if (counts) out += "," + std::to_string(*r.impressions) + "," + std::to_string(*r.clicks);
    out += "\n";
  }
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw std::invalid_argument("train_fraction must lie in (0,1)");
  const std::size_t n = ds.size();
  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * train_fraction));
  if (n_train == 0 || n_train == n) throw std::invalid_argument("dataset too small to split into two non-empty sides");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span(order));
  Dataset train{ds.feature_names, ds.fingerprint, {}};
  Dataset test{ds.feature_names, ds.fingerprint, {}};
  for (std::size_t i = 0; i < n; ++i) (i < n_train ? train : test).rows.push_back(ds.rows[order[i]]);
  return {std::move(train), std::move(test)};
}

// ---------------------------------------------------------------- spec

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::logistic_regression: return "logistic_regression";
    case ModelKind::decision_tree: return "decision_tree";
    case ModelKind::random_forest: return "random_forest";
  }
  return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view s) {
  for (const auto k : {ModelKind::logistic_regression, ModelKind::decision_tree, ModelKind::random_forest}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

void ModelSpec::validate(std::size_t n_features) const {
  if (!(logistic.learning_rate > 0.0) || !std::isfinite(logistic.learning_rate)) {
    throw ConfigError("learning_rate must be positive");
  }
  if (!(logistic.l2 >= 0.0) || !std::isfinite(logistic.l2)) throw ConfigError("l2 must be non-negative");
  if (logistic.max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (!(logistic.tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  if (tree.max_depth < 0) throw ConfigError("max_depth must be >= 0");
  if (tree.min_samples_split < 2) throw ConfigError("min_samples_split must be >= 2");
  if (forest.n_trees < 1) throw ConfigError("n_trees must be >= 1");
  if (forest.features_per_split < 0 || static_cast<std::size_t>(forest.features_per_split) > n_features) {
    throw ConfigError("features_per_split must lie in [0, feature count]");
  }
}

// ---------------------------------------------------------------- training

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Column-major copy of the training features with combined row weights.
struct TrainingView {
  std::size_t n = 0;
  std::size_t f = 0;
  std::vector<double> cols;
  std::vector<int> y;
  std::vector<double> w;

  [[nodiscard]] double x(std::size_t row, std::size_t feature) const { return cols[feature * n + row]; }
};

TrainingView make_view(const Dataset& ds, const ModelSpec& spec, std::optional<std::span<const double>> sample_weights) {
  ds.validate();
  TrainingView v;
  v.n = ds.size();
  v.f = ds.n_features();
  if (v.n == 0) throw std::invalid_argument("train: empty dataset");
  if (sample_weights && sample_weights->size() != v.n) throw std::invalid_argument("train: one sample weight per row");
  v.cols.resize(v.n * v.f);
  v.y = ds.labels();
  v.w.assign(v.n, 1.0);
  for (std::size_t i = 0; i < v.n; ++i) {
    for (std::size_t j = 0; j < v.f; ++j) v.cols[j * v.n + i] = ds.rows[i].values[j];
    if (sample_weights) {
      const double sw = (*sample_weights)[i];
      if (!(sw >= 0.0) || !std::isfinite(sw)) throw std::invalid_argument("train: sample weights must be finite and >= 0");
      v.w[i] = sw;
    }
  }
  double w_pos = 0.0;
  double w_neg = 0.0;
  for (std::size_t i = 0; i < v.n; ++i) (v.y[i] ? w_pos : w_neg) += v.w[i];
  if (w_pos <= 0.0 || w_neg <= 0.0) throw std::invalid_argument("train: both classes must be present");
  if (spec.class_weight == ClassWeightMode::balanced) {
    const double total = w_pos + w_neg;
    const double cw_pos = total / (2.0 * w_pos);
    const double cw_neg = total / (2.0 * w_neg);
    for (std::size_t i = 0; i < v.n; ++i) v.w[i] *= v.y[i] ? cw_pos : cw_neg;
  }
  return v;
}

LogisticModel train_logistic(const TrainingView& v, const LogisticParams& p) {
  LogisticModel m;
  m.mean.assign(v.f, 0.0);
  m.scale.assign(v.f, 1.0);
  m.weights.assign(v.f, 0.0);
  const double w_total = std::accumulate(v.w.begin(), v.w.end(), 0.0);

  std::vector<double> z(v.n * v.f);
  for (std::size_t j = 0; j < v.f; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < v.n; ++i) mean += v.w[i] * v.x(i, j);
    mean /= w_total;
    double var = 0.0;
    for (std::size_t i = 0; i < v.n; ++i) var += v.w[i] * (v.x(i, j) - mean) * (v.x(i, j) - mean);
    const double sd = std::sqrt(var / w_total);
    m.mean[j] = mean;
    m.scale[j] = sd > 1e-12 ? sd : 1.0;
    for (std::size_t i = 0; i < v.n; ++i) z[j * v.n + i] = (v.x(i, j) - mean) / m.scale[j];
  }

  std::vector<double> residual(v.n);
  std::vector<double> grad(v.f);
  for (int epoch = 0; epoch < p.max_epochs; ++epoch) {
    for (std::size_t i = 0; i < v.n; ++i) {
      double s = m.bias;
      for (std::size_t j = 0; j < v.f; ++j) s += m.weights[j] * z[j * v.n + i];
      residual[i] = v.w[i] * (sigmoid(s) - v.y[i]) / w_total;
    }
    double grad_bias = std::accumulate(residual.begin(), residual.end(), 0.0);
    double largest = std::abs(grad_bias);
    for (std::size_t j = 0; j < v.f; ++j) {
      double g = p.l2 * m.weights[j];
      for (std::size_t i = 0; i < v.n; ++i) g += residual[i] * z[j * v.n + i];
      grad[j] = g;
      largest = std::max(largest, std::abs(g));
    }
    m.epochs_run = epoch + 1;
    if (largest < p.tolerance) break;
    m.bias -= p.learning_rate * grad_bias;
    for (std::size_t j = 0; j < v.f; ++j) m.weights[j] -= p.learning_rate * grad[j];
  }
  return m;
}

class TreeBuilder {
 public:
  TreeBuilder(const TrainingView& v, const TreeParams& p, std::size_t features_per_split, std::uint64_t seed)
      : v_(v), p_(p), m_(features_per_split), rng_(seed) {
    features_.resize(v.f);
    std::iota(features_.begin(), features_.end(), 0);
  }

  DecisionTree build(std::vector<std::size_t> samples) {
    DecisionTree tree;
    grow(tree, samples, 0);
    return tree;
  }

 private:
  int grow(DecisionTree& tree, std::vector<std::size_t>& samples, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    double w = 0.0;
    double wp = 0.0;
    for (const auto i : samples) {
      w += v_.w[i];
      wp += v_.w[i] * v_.y[i];
    }
    tree.nodes[id].weight = w;
    tree.nodes[id].value = w > 0.0 ? wp / w : 0.0;
    if (depth >= p_.max_depth || samples.size() < static_cast<std::size_t>(p_.min_samples_split) || wp <= 0.0 ||
        wp >= w) {
      return id;
    }

    if (m_ < v_.f) {
      for (std::size_t k = 0; k < m_; ++k) {
        const auto r = k + static_cast<std::size_t>(rng_.below(v_.f - k));
        std::swap(features_[k], features_[r]);
      }
    }
    const std::size_t n_candidates = std::min(m_, v_.f);
    const double parent = w * gini(wp / w);

    double best_gain = 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::size_t> sorted = samples;
    for (std::size_t c = 0; c < n_candidates; ++c) {
      const std::size_t f = features_[c];
      std::stable_sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) { return v_.x(a, f) < v_.x(b, f); });
      double wl = 0.0;
      double wpl = 0.0;
      for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
        const auto i = sorted[k];
        wl += v_.w[i];
        wpl += v_.w[i] * v_.y[i];
        const double a = v_.x(i, f);
        const double b = v_.x(sorted[k + 1], f);
        if (!(a < b)) continue;
        const double wr = w - wl;
        if (wl <= 0.0 || wr <= 0.0) continue;
        const double gain = parent - wl * gini(wpl / wl) - wr * gini((wp - wpl) / wr);
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          const double mid = a + (b - a) / 2.0;
          best_threshold = mid < b ? mid : a;
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (const auto i : samples) {
      (v_.x(i, static_cast<std::size_t>(best_feature)) <= best_threshold ? left : right).push_back(i);
    }
    samples.clear();
    samples.shrink_to_fit();
    tree.nodes[id].feature = best_feature;
    tree.nodes[id].threshold = best_threshold;
    tree.nodes[id].impurity_decrease = best_gain;
    const int l = grow(tree, left, depth + 1);
    const int r = grow(tree, right, depth + 1);
    tree.nodes[id].left = l;
    tree.nodes[id].right = r;
    return id;
  }

  static double gini(double p) { return 2.0 * p * (1.0 - p); }

  const TrainingView& v_;
  TreeParams p_;
  std::size_t m_;
  Rng rng_;
  std::vector<std::size_t> features_;
};

std::size_t resolve_features_per_split(const ForestParams& p, std::size_t n_features) {
  if (p.features_per_split > 0) return static_cast<std::size_t>(p.features_per_split);
  const auto m = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n_features))));
  return std::clamp<std::size_t>(m, 1, std::max<std::size_t>(n_features, 1));
}

}  // namespace

TrainedModel train(const Dataset& ds, const ModelSpec& spec, std::optional<std::span<const double>> sample_weights) {
  spec.validate(ds.n_features());
  const TrainingView v = make_view(ds, spec, sample_weights);
  TrainedModel model;
  model.kind = spec.kind;
  model.spec = spec;
  model.feature_names = ds.feature_names;
  model.fingerprint = ds.fingerprint;
  model.n_train = ds.size();

  std::vector<std::size_t> all(v.n);
  std::iota(all.begin(), all.end(), 0);
  switch (spec.kind) {
    case ModelKind::logistic_regression:
      model.logistic = train_logistic(v, spec.logistic);
      break;
    case ModelKind::decision_tree: {
      TreeBuilder builder(v, spec.tree, v.f, derive_seed(spec.seed, 0));
      model.trees.push_back(builder.build(all));
      break;
    }
    case ModelKind::random_forest: {
      const std::size_t m = resolve_features_per_split(spec.forest, v.f);
      for (int t = 0; t < spec.forest.n_trees; ++t) {
        const std::uint64_t tree_seed = derive_seed(spec.seed, static_cast<std::uint64_t>(t));
        std::vector<std::size_t> samples = all;
        if (spec.forest.bootstrap) {
          Rng boot(derive_seed(tree_seed, 0xB007));
          for (auto& s : samples) s = static_cast<std::size_t>(boot.below(v.n));
        }
        TreeBuilder builder(v, spec.tree, m, tree_seed);
        model.trees.push_back(builder.build(std::move(samples)));
      }
      break;
    }
  }
  return model;
}

// ---------------------------------------------------------------- prediction

double DecisionTree::predict(std::span<const double> x) const {
  if (nodes.empty()) throw std::logic_error("predict on an empty tree");
  int i = 0;
  while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
    const auto& n = nodes[static_cast<std::size_t>(i)];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(i)].value;
}

int DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<int> d(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, d[i]);
    if (nodes[i].feature >= 0) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return deepest;
}

double predict_ctr(const TrainedModel& model, std::span<const double> x) {
  if (x.size() != model.feature_names.size()) throw DataError("features", "vector length differs from the model");
  switch (model.kind) {
    case ModelKind::logistic_regression: {
      const auto& m = model.logistic;
      double s = m.bias;
      for (std::size_t j = 0; j < x.size(); ++j) s += m.weights[j] * (x[j] - m.mean[j]) / m.scale[j];
      return sigmoid(s);
    }
    case ModelKind::decision_tree:
    case ModelKind::random_forest: {
      double total = 0.0;
      for (const auto& t : model.trees) total += t.predict(x);
      return total / static_cast<double>(model.trees.size());
    }
  }
  return 0.0;
}

double predict_ctr(const TrainedModel& model, const FeatureVector& vec) {
  if (vec.fingerprint() != model.fingerprint) {
    throw DataError("features", "feature set " + hex64(vec.fingerprint()) + " does not match model " +
                                    hex64(model.fingerprint));
  }
  return predict_ctr(model, vec.dense());
}

std::vector<std::string> rank_by_score(std::span<const std::string> ids, std::span<const double> scores) {
  if (ids.size() != scores.size()) throw std::invalid_argument("rank: ids and scores differ in length");
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids[a] < ids[b];
  });
  std::vector<std::string> out;
  out.reserve(order.size());
  for (const auto i : order) out.push_back(ids[i]);
  return out;
}

std::vector<std::string> rank(const TrainedModel& model, std::span<const std::pair<std::string, FeatureVector>> items) {
  std::vector<std::string> ids;
  std::vector<double> scores;
  for (const auto& [id, vec] : items) {
    ids.push_back(id);
    scores.push_back(predict_ctr(model, vec));
  }
  return rank_by_score(ids, scores);
}

std::vector<std::pair<std::string, double>> feature_importance(const TrainedModel& model) {
  const std::size_t f = model.feature_names.size();
  std::vector<double> imp(f, 0.0);
  auto normalize = [](std::vector<double>& v) {
    const double total = std::accumulate(v.begin(), v.end(), 0.0);
    if (total > 0.0) {
      for (auto& x : v) x /= total;
    }
  };
  if (model.kind == ModelKind::logistic_regression) {
    for (std::size_t j = 0; j < f; ++j) imp[j] = std::abs(model.logistic.weights[j]);
    normalize(imp);
  } else {
    for (const auto& tree : model.trees) {
      std::vector<double> t(f, 0.0);
      for (const auto& n : tree.nodes) {
        if (n.feature >= 0) t[static_cast<std::size_t>(n.feature)] += n.impurity_decrease;
      }
      normalize(t);
      for (std::size_t j = 0; j < f; ++j) imp[j] += t[j];
    }
    normalize(imp);
  }
  std::vector<std::size_t> order(f);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return imp[a] > imp[b]; });
  std::vector<std::pair<std::string, double>> out;
  out.reserve(f);
  for (const auto j : order) out.emplace_back(model.feature_names[j], imp[j]);
  return out;
}

EvalReport evaluate(const TrainedModel& model, const Dataset& test) {
  if (test.rows.empty()) throw std::invalid_argument("evaluate: empty test set");
  if (test.fingerprint != model.fingerprint) throw DataError("test", "feature set does not match the model");
  std::vector<double> scores;
  scores.reserve(test.size());
  for (const auto& r : test.rows) scores.push_back(predict_ctr(model, r.values));
  const auto labels = test.labels();
  const auto ctrs = test.ctrs();
  EvalReport rep;
  rep.model_kind = std::string(to_string(model.kind));
  rep.auc = auc(scores, labels);
  rep.ndcg = ndcg(scores, ctrs);
  rep.n_test = test.size();
  rep.n_positive = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  rep.n_train = model.n_train;
  rep.fingerprint = hex64(model.fingerprint);
  auto imp = feature_importance(model);
  imp.resize(std::min<std::size_t>(imp.size(), 10));
  rep.top_features = std::move(imp);
  return rep;
}

// ---------------------------------------------------------------- artifacts

namespace detail {

json model_spec_to_json(const ModelSpec& spec) {
  return {{"kind", to_string(spec.kind)},
          {"class_weight", spec.class_weight == ClassWeightMode::balanced ? "balanced" : "none"},
          {"seed", spec.seed},
          {"logistic",
           {{"learning_rate", spec.logistic.learning_rate},
            {"l2", spec.logistic.l2},
            {"max_epochs", spec.logistic.max_epochs},
            {"tolerance", spec.logistic.tolerance}}},
          {"tree", {{"max_depth", spec.tree.max_depth}, {"min_samples_split", spec.tree.min_samples_split}}},
          {"forest",
           {{"n_trees", spec.forest.n_trees},
            {"features_per_split", spec.forest.features_per_split},
            {"bootstrap", spec.forest.bootstrap}}}};
}

ModelSpec model_spec_from_json(const json& v, const std::string& path, ModelSpec base) {
  if (!v.is_object()) throw DataError(path, "expected an object");
  ModelSpec s = base;
  if (const json* k = optional_field(v, "kind")) {
    const auto kp = join_path(path, "kind");
    const auto kind = parse_model_kind(as_string(*k, kp));
    if (!kind) throw DataError(kp, "unknown model kind");
    s.kind = *kind;
  }
  if (const json* cw = optional_field(v, "class_weight")) {
    const auto cp = join_path(path, "class_weight");
    const auto text = as_string(*cw, cp);
    if (text == "balanced") {
      s.class_weight = ClassWeightMode::balanced;
    } else if (text == "none") {
      s.class_weight = ClassWeightMode::none;
    } else {
      throw DataError(cp, "expected balanced or none");
    }
  }
  if (const json* seed = optional_field(v, "seed")) {
    const auto sp = join_path(path, "seed");
    if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<long long>() >= 0)) {
      throw DataError(sp, "expected a non-negative integer");
    }
    s.seed = seed->get<std::uint64_t>();
  }
  auto int_or = [&](const json& obj, std::string_view key, int fallback, const std::string& parent) {
    const json* x = optional_field(obj, key);
    return x ? static_cast<int>(as_integer(*x, join_path(parent, key))) : fallback;
  };
  if (const json* lr = optional_field(v, "logistic")) {
    const auto lp = join_path(path, "logistic");
    s.logistic.learning_rate = number_or(*lr, "learning_rate", s.logistic.learning_rate, lp);
    s.logistic.l2 = number_or(*lr, "l2", s.logistic.l2, lp);
    s.logistic.max_epochs = int_or(*lr, "max_epochs", s.logistic.max_epochs, lp);
    s.logistic.tolerance = number_or(*lr, "tolerance", s.logistic.tolerance, lp);
  }
  if (const json* t = optional_field(v, "tree")) {
    const auto tp = join_path(path, "tree");
    s.tree.max_depth = int_or(*t, "max_depth", s.tree.max_depth, tp);
    s.tree.min_samples_split = int_or(*t, "min_samples_split", s.tree.min_samples_split, tp);
  }
  if (const json* f = optional_field(v, "forest")) {
    const auto fp = join_path(path, "forest");
    s.forest.n_trees = int_or(*f, "n_trees", s.forest.n_trees, fp);
    s.forest.features_per_split = int_or(*f, "features_per_split", s.forest.features_per_split, fp);
    if (const json* b = optional_field(*f, "bootstrap")) s.forest.bootstrap = as_bool(*b, join_path(fp, "bootstrap"));
  }
  return s;
}

}  // namespace detail

namespace {

json tree_to_json(const DecisionTree& t) {
  json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
       value = json::array(), weight = json::array(), gain = json::array();
  for (const auto& n : t.nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
    weight.push_back(n.weight);
    gain.push_back(n.impurity_decrease);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left},   {"right", right},
          {"value", value},     {"weight", weight},       {"gain", gain}};
}

std::vector<double> doubles(const json& v, const std::string& path) {
  const auto& arr = detail::as_array(v, path);
  std::vector<double> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(detail::as_number(arr[i], detail::index_path(path, i)));
  return out;
}

DecisionTree tree_from_json(const json& v, const std::string& path) {
  auto column = [&](std::string_view key) { return doubles(detail::require(v, key, path), detail::join_path(path, key)); };
  const auto feature = column("feature");
  const auto threshold = column("threshold");
  const auto left = column("left");
  const auto right = column("right");
  const auto value = column("value");
  const auto weight = column("weight");
  const auto gain = column("gain");
  const std::size_t n = feature.size();
  for (const auto* c : {&threshold, &left, &right, &value, &weight, &gain}) {
    if (c->size() != n) throw DataError(path, "tree columns differ in length");
  }
  if (n == 0) throw DataError(path, "empty tree");
  DecisionTree t;
  for (std::size_t i = 0; i < n; ++i) {
    TreeNode node{static_cast<int>(feature[i]), threshold[i], static_cast<int>(left[i]), static_cast<int>(right[i]),
                  value[i], weight[i], gain[i]};
    if (node.feature >= 0 && (node.left <= static_cast<int>(i) || node.right <= static_cast<int>(i) ||
                              node.left >= static_cast<int>(n) || node.right >= static_cast<int>(n))) {
      throw DataError(detail::index_path(path, i), "child index out of range");
    }
    t.nodes.push_back(node);
  }
  return t;
}

}  // namespace

std::string serialize_model(const TrainedModel& model) {
  json doc = {{"format", "bannerforge-model"},
              {"version", 1},
              {"kind", to_string(model.kind)},
              {"spec", detail::model_spec_to_json(model.spec)},
              {"seed", model.spec.seed},
              {"fingerprint", hex64(model.fingerprint)},
              {"n_train", model.n_train},
              {"feature_names", model.feature_names}};
  if (model.kind == ModelKind::logistic_regression) {
    doc["logistic"] = {{"mean", model.logistic.mean},
                       {"scale", model.logistic.scale},
                       {"weights", model.logistic.weights},
                       {"bias", model.logistic.bias},
                       {"epochs_run", model.logistic.epochs_run}};
  } else {
    json trees = json::array();
    for (const auto& t : model.trees) trees.push_back(tree_to_json(t));
    doc["trees"] = std::move(trees);
  }
  return doc.dump() + "\n";
}

TrainedModel parse_model(std::string_view json_text) {
  const json doc = detail::parse_json(json_text, "model");
  TrainedModel m;
  const auto kind_text = detail::as_string(detail::require(doc, "kind", ""), "kind");
  const auto kind = parse_model_kind(kind_text);
  if (!kind) throw DataError("kind", "unknown model kind");
  m.kind = *kind;
  m.spec = detail::model_spec_from_json(detail::require(doc, "spec", ""), "spec");
  m.spec.kind = m.kind;
  const auto& names = detail::as_array(detail::require(doc, "feature_names", ""), "feature_names");
  for (std::size_t i = 0; i < names.size(); ++i) {
    m.feature_names.push_back(detail::as_string(names[i], detail::index_path("feature_names", i)));
  }
  m.fingerprint = names_fingerprint(m.feature_names);
  if (detail::as_string(detail::require(doc, "fingerprint", ""), "fingerprint") != hex64(m.fingerprint)) {
    throw DataError("fingerprint", "does not match feature_names");
  }
  if (const json* n = detail::optional_field(doc, "n_train")) {
    m.n_train = static_cast<std::size_t>(detail::as_integer(*n, "n_train"));
  }
  const std::size_t f = m.feature_names.size();
  if (m.kind == ModelKind::logistic_regression) {
    const auto& lr = detail::require(doc, "logistic", "");
    m.logistic.mean = doubles(detail::require(lr, "mean", "logistic"), "logistic.mean");
    m.logistic.scale = doubles(detail::require(lr, "scale", "logistic"), "logistic.scale");
    m.logistic.weights = doubles(detail::require(lr, "weights", "logistic"), "logistic.weights");
    m.logistic.bias = detail::as_number(detail::require(lr, "bias", "logistic"), "logistic.bias");
    if (const json* e = detail::optional_field(lr, "epochs_run")) {
      m.logistic.epochs_run = static_cast<int>(detail::as_integer(*e, "logistic.epochs_run"));
    }
    if (m.logistic.mean.size() != f || m.logistic.scale.size() != f || m.logistic.weights.size() != f) {
      throw DataError("logistic", "parameter length differs from feature count");
    }
  } else {
    const auto& trees = detail::as_array(detail::require(doc, "trees", ""), "trees");
    for (std::size_t i = 0; i < trees.size(); ++i) {
      auto t = tree_from_json(trees[i], detail::index_path("trees", i));
      for (const auto& n : t.nodes) {
        if (n.feature >= static_cast<int>(f)) throw DataError(detail::index_path("trees", i), "feature index out of range");
      }
      m.trees.push_back(std::move(t));
    }
    if (m.trees.empty()) throw DataError("trees", "model has no trees");
  }
  return m;
}

std::string serialize_eval_report(const EvalReport& r) {
  json top = json::array();
  for (const auto& [name, imp] : r.top_features) top.push_back({{"feature", name}, {"importance", imp}});
  const json doc = {{"model_kind", r.model_kind}, {"auc", r.auc},           {"ndcg", r.ndcg},
                    {"n_test", r.n_test},         {"n_positive", r.n_positive}, {"n_train", r.n_train},
                    {"fingerprint", r.fingerprint}, {"top_features", top}};
  return doc.dump(2) + "\n";
}

ModelSpec parse_model_spec(std::string_view json_text) {
  return detail::model_spec_from_json(detail::parse_json(json_text, "model spec"), "");
}

std::string serialize_model_spec(const ModelSpec& spec) { return detail::model_spec_to_json(spec).dump(2) + "\n"; }

}  // namespace bannerforge
