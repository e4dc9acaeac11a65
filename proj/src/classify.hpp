#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace periorbital {

inline constexpr int kHealthy = 0;
inline constexpr int kDisease = 1;

// Invalid feature values are NaN until a model imputes them.
struct LabeledRow {
  std::vector<double> features;
  int label = kHealthy;
  std::string id;
  // Rows sharing a group (an original and its left/right-swapped twin)
  // always land on the same side of any split or fold boundary.
  std::string group;
};

struct LabeledDataset {
  std::vector<std::string> feature_names;
  std::vector<LabeledRow> rows;

  std::size_t size() const noexcept { return rows.size(); }
  std::size_t width() const noexcept { return feature_names.size(); }
  std::size_t count(int label) const noexcept;
  void validate() const;
};

// Swaps every right_* feature with its left_* counterpart; globals stay.
LabeledRow swap_lr(const LabeledRow& row);

// Original rows followed by one swapped twin per row.
LabeledDataset augment_swap_lr(const LabeledDataset& data);

struct TrainTestSplit {
  LabeledDataset train;
  LabeledDataset test;
};

// Stratified by label and grouped by LabeledRow::group.
TrainTestSplit split_train_test(const LabeledDataset& data, double train_fraction, std::uint64_t seed);

enum class ModelFamily { RandomForest, GradientBoosting };

std::string to_string(ModelFamily f);
ModelFamily parse_model_family(const std::string& s);

struct TreeParams {
  int n_trees = 100;
  int max_depth = 0;  // 0 = grow until pure or min_leaf binds
  int min_leaf = 1;
  double learning_rate = 0.1;  // boosting only
  int max_features = 0;        // 0 = sqrt(width) for forests, all for boosting
};

nlohmann::json to_json(const TreeParams& p);
TreeParams tree_params_from_json(const nlohmann::json& j);

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct Tree {
  std::vector<TreeNode> nodes;
  double evaluate(std::span<const double> x) const;
};

class Model {
 public:
  Model() = default;

  ModelFamily family() const noexcept { return family_; }
  const TreeParams& params() const noexcept { return params_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::vector<Tree>& trees() const noexcept { return trees_; }
  const std::vector<double>& imputation() const noexcept { return impute_; }

  // Probability of the disease class. NaN features take the training median.
  double predict_proba(std::span<const double> x) const;
  int predict(std::span<const double> x) const { return predict_proba(x) >= 0.5 ? kDisease : kHealthy; }
  std::vector<double> predict_proba(const LabeledDataset& data) const;
  std::vector<int> predict(const LabeledDataset& data) const;

  nlohmann::json to_json() const;
  static Model from_json(const nlohmann::json& j);

 private:
  friend Model train_model(ModelFamily, const LabeledDataset&, const TreeParams&, std::uint64_t, unsigned);

  ModelFamily family_ = ModelFamily::RandomForest;
  TreeParams params_;
  std::uint64_t seed_ = 0;
  std::vector<std::string> feature_names_;
  std::vector<double> impute_;
  double base_score_ = 0.0;  // boosting: initial log-odds
  std::vector<Tree> trees_;
};

// Per-feature median over non-NaN training values (0 when none are valid).
std::vector<double> feature_medians(const LabeledDataset& data);

// Forest: bootstrap samples, Gini splits over sqrt(width) random features,
// probability = fraction of trees voting disease. Boosting: stagewise
// regression trees on the logistic-loss gradient with Newton leaf values.
// Trees are seeded per index, so results do not depend on `threads`.
Model train_model(ModelFamily family, const LabeledDataset& train, const TreeParams& params, std::uint64_t seed,
                  unsigned threads = 0);
Model train_random_forest(const LabeledDataset& train, const TreeParams& params, std::uint64_t seed,
                          unsigned threads = 0);
Model train_gbt(const LabeledDataset& train, const TreeParams& params, std::uint64_t seed, unsigned threads = 0);

struct GridPoint {
  std::size_t index = 0;
  TreeParams params;
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0.0;
};

struct GridResult {
  std::size_t best_index = 0;
  TreeParams best;
  std::vector<GridPoint> table;
};

// k-fold cross-validated accuracy per grid point. Best is the highest mean
// accuracy; ties prefer fewer trees, then shallower depth, then grid order.
GridResult grid_search(ModelFamily family, const std::vector<TreeParams>& grid, const LabeledDataset& train,
                       int folds, std::uint64_t seed, unsigned threads = 0);

std::vector<TreeParams> default_grid(ModelFamily family);
// Cartesian product of the keys n_trees, max_depth (null = unlimited),
// min_leaf, learning_rate, max_features; missing keys take the defaults.
std::vector<TreeParams> grid_from_json(const nlohmann::json& j, ModelFamily family);

struct ClassMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  bool precision_defined = true;
  bool recall_defined = true;
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
};

// Disease is the positive class. An undefined ratio reports 0 and is flagged.
ClassMetrics metrics(const std::vector<int>& predictions, const std::vector<int>& labels);

// Mann-Whitney AUROC; tied scores contribute one half.
double auroc(const std::vector<double>& scores, const std::vector<int>& labels);

}  // namespace periorbital
