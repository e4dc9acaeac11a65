#include "classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <tuple>

#include "core.hpp"
#include "parallel.hpp"
#include "seed.hpp"

namespace periorbital {

std::size_t LabeledDataset::count(int label) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [&](const LabeledRow& r) { return r.label == label; }));
}

void LabeledDataset::validate() const {
  for (const auto& r : rows) {
    if (r.features.size() != feature_names.size())
      throw Error(ErrorCode::DimensionMismatch, "row '" + r.id + "' has the wrong feature width");
    if (r.label != kHealthy && r.label != kDisease)
      throw Error(ErrorCode::InvalidArgument, "row '" + r.id + "' has a non-binary label");
  }
}

LabeledRow swap_lr(const LabeledRow& row) {
  if (row.features.size() != kFeatureCount)
    throw Error(ErrorCode::DimensionMismatch, "left/right swap needs the full registry width");
  LabeledRow out = row;
  for (std::size_t i = 0; i < kFeatureCount; ++i) out.features[i] = row.features[mirror_feature_index(i)];
  return out;
}

LabeledDataset augment_swap_lr(const LabeledDataset& data) {
  data.validate();
  LabeledDataset out;
  out.feature_names = data.feature_names;
  out.rows.reserve(2 * data.size());
  out.rows = data.rows;
  for (auto& r : out.rows)
    if (r.group.empty()) r.group = r.id;
  for (std::size_t i = 0; i < data.size(); ++i) {
    LabeledRow twin = swap_lr(out.rows[i]);
    twin.id = out.rows[i].id + "~lr";
    out.rows.push_back(std::move(twin));
  }
  return out;
}

namespace {

// Group keys per label, in first-appearance order.
std::map<int, std::vector<std::string>> groups_by_label(const LabeledDataset& data) {
  std::map<int, std::vector<std::string>> out;
  std::map<std::string, int> seen;
  for (const auto& r : data.rows) {
    const std::string& g = r.group.empty() ? r.id : r.group;
    const auto [it, inserted] = seen.emplace(g, r.label);
    if (inserted)
      out[r.label].push_back(g);
    else if (it->second != r.label)
      throw Error(ErrorCode::InvalidArgument, "group '" + g + "' mixes labels");
  }
  return out;
}

LabeledDataset select_groups(const LabeledDataset& data, const std::map<std::string, bool>& in, bool want) {
  LabeledDataset out;
  out.feature_names = data.feature_names;
  for (const auto& r : data.rows) {
    const auto it = in.find(r.group.empty() ? r.id : r.group);
    if (it != in.end() && it->second == want) out.rows.push_back(r);
  }
  return out;
}

}  // namespace

TrainTestSplit split_train_test(const LabeledDataset& data, double train_fraction, std::uint64_t seed) {
  data.validate();
  if (data.size() < 5) throw Error(ErrorCode::InvalidArgument, "split_train_test: need at least 5 rows");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error(ErrorCode::InvalidArgument, "split_train_test: fraction must be in (0,1)");
  auto groups = groups_by_label(data);
  if (groups[kHealthy].empty() || groups[kDisease].empty())
    throw Error(ErrorCode::InvalidArgument, "split_train_test: both classes must be present");
  std::map<std::string, bool> in_train;
  for (auto& [label, keys] : groups) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(label)));
    std::shuffle(keys.begin(), keys.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(keys.size())));
    for (std::size_t i = 0; i < keys.size(); ++i) in_train[keys[i]] = i < n_train;
  }
  return TrainTestSplit{select_groups(data, in_train, true), select_groups(data, in_train, false)};
}

std::string to_string(ModelFamily f) { return f == ModelFamily::RandomForest ? "rf" : "gbt"; }

ModelFamily parse_model_family(const std::string& s) {
  if (s == "rf" || s == "random_forest") return ModelFamily::RandomForest;
  if (s == "gbt" || s == "gradient_boosting") return ModelFamily::GradientBoosting;
  throw Error(ErrorCode::Parse, "unknown model family '" + s + "'");
}

nlohmann::json to_json(const TreeParams& p) {
  return nlohmann::json{{"n_trees", p.n_trees},
                        {"max_depth", p.max_depth},
                        {"min_leaf", p.min_leaf},
                        {"learning_rate", p.learning_rate},
                        {"max_features", p.max_features}};
}

TreeParams tree_params_from_json(const nlohmann::json& j) {
  TreeParams p;
  p.n_trees = j.value("n_trees", p.n_trees);
  p.max_depth = j.contains("max_depth") && !j["max_depth"].is_null() ? j["max_depth"].get<int>() : 0;
  p.min_leaf = j.value("min_leaf", p.min_leaf);
  p.learning_rate = j.value("learning_rate", p.learning_rate);
  p.max_features = j.value("max_features", p.max_features);
  return p;
}

double Tree::evaluate(std::span<const double> x) const {
  int i = 0;
  while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
    const TreeNode& n = nodes[static_cast<std::size_t>(i)];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(i)].value;
}

// ---------------------------------------------------------------------------
// CART builder shared by both families.

namespace {

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

Matrix imputed_matrix(const LabeledDataset& d, const std::vector<double>& medians) {
  Matrix m{d.size(), d.width(), std::vector<double>(d.size() * d.width())};
  for (std::size_t r = 0; r < d.size(); ++r)
    for (std::size_t c = 0; c < d.width(); ++c) {
      const double v = d.rows[r].features[c];
      m.data[r * m.cols + c] = std::isnan(v) ? medians[c] : v;
    }
  return m;
}

class TreeBuilder {
 public:
  enum class Criterion { Gini, SquaredError };

  TreeBuilder(const Matrix& x, const std::vector<double>& target, const std::vector<double>* hessian,
              Criterion criterion, const TreeParams& params, std::size_t mtry, std::mt19937_64& rng)
      : x_(x), y_(target), h_(hessian), crit_(criterion), params_(params), mtry_(mtry), rng_(rng) {
    features_.resize(x.cols);
    std::iota(features_.begin(), features_.end(), std::size_t{0});
  }

  Tree build(const std::vector<std::size_t>& sample) {
    tree_.nodes.clear();
    // When most features are scanned at every node, each feature's order is
    // sorted once here and kept sorted by stable partitioning on the way
    // down. Otherwise only the sampled features are sorted per node.
    presorted_ = 2 * mtry_ > x_.cols;
    Orders orders(presorted_ ? x_.cols : 1, sample);
    for (std::size_t f = 0; presorted_ && f < x_.cols; ++f)
      std::stable_sort(orders[f].begin(), orders[f].end(),
                       [&](std::size_t a, std::size_t b) { return x_.at(a, f) < x_.at(b, f); });
    grow(orders, 0);
    return std::move(tree_);
  }

 private:
  using Orders = std::vector<std::vector<std::size_t>>;

  struct Split {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double score = 0.0;
  };

  double leaf_value(const std::vector<std::size_t>& s) const {
    double sum = 0.0;
    for (auto i : s) sum += y_[i];
    if (!h_) return sum / static_cast<double>(s.size());
    double hs = 0.0;
    for (auto i : s) hs += (*h_)[i];
    return hs > 1e-12 ? sum / hs : 0.0;
  }

  bool pure(const std::vector<std::size_t>& s) const {
    for (auto i : s)
      if (y_[i] != y_[s.front()]) return false;
    return true;
  }

  // Impurity decrease proxy: larger is better.
  double gain(double sum_l, double n_l, double sum_r, double n_r) const {
    if (crit_ == Criterion::Gini) {
      // Weighted Gini n*2p(1-p) = 2*pos*(n-pos)/n; negate so larger is better.
      return -(2.0 * sum_l * (n_l - sum_l) / n_l + 2.0 * sum_r * (n_r - sum_r) / n_r);
    }
    return sum_l * sum_l / n_l + sum_r * sum_r / n_r;
  }

  Split best_split(const Orders& orders) {
    const std::vector<std::size_t>& s = orders.front();
    // Partial Fisher-Yates picks mtry distinct candidate features.
    for (std::size_t k = 0; k < mtry_; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, features_.size() - 1);
      std::swap(features_[k], features_[pick(rng_)]);
    }
    const double n = static_cast<double>(s.size());
    double total = 0.0;
    for (auto i : s) total += y_[i];
    // An empty right side contributes nothing, so this scores the unsplit node.
    const double parent = gain(total, n, 0.0, 1.0);
    const auto min_leaf = static_cast<std::size_t>(std::max(1, params_.min_leaf));

    Split best;
    std::vector<std::pair<double, double>> col(s.size());
    for (std::size_t k = 0; k < mtry_; ++k) {
      const std::size_t f = features_[k];
      const std::vector<std::size_t>& order = presorted_ ? orders[f] : s;
      for (std::size_t j = 0; j < order.size(); ++j) col[j] = {x_.at(order[j], f), y_[order[j]]};
      if (!presorted_) std::sort(col.begin(), col.end());
      double sum_l = 0.0;
      for (std::size_t j = 0; j + 1 < col.size(); ++j) {
        sum_l += col[j].second;
        const std::size_t n_l = j + 1;
        if (col[j].first == col[j + 1].first) continue;
        if (n_l < min_leaf || col.size() - n_l < min_leaf) continue;
        const double score = gain(sum_l, static_cast<double>(n_l), total - sum_l, n - static_cast<double>(n_l));
        if (score > parent + 1e-12 && (!best.found || score > best.score)) {
          // Threshold on an observed value, so decisions depend only on the
          // ordering of each feature.
          best = Split{true, f, col[j].first, score};
        }
      }
    }
    return best;
  }

  int grow(Orders orders, int depth) {
    const std::vector<std::size_t>& s = orders.front();
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back(TreeNode{});
    const auto min_leaf = static_cast<std::size_t>(std::max(1, params_.min_leaf));
    const bool depth_cap = params_.max_depth > 0 && depth >= params_.max_depth;
    Split split;
    if (!depth_cap && s.size() >= 2 * min_leaf && !pure(s)) split = best_split(orders);
    const double value = leaf_value(s);
    if (!split.found) {
      tree_.nodes[static_cast<std::size_t>(id)].value = value;
      return id;
    }
    Orders left(orders.size()), right(orders.size());
    for (std::size_t f = 0; f < orders.size(); ++f)
      for (auto i : orders[f]) (x_.at(i, split.feature) <= split.threshold ? left : right)[f].push_back(i);
    Orders().swap(orders);
    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    TreeNode& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = static_cast<int>(split.feature);
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    node.value = value;
    return id;
  }

  const Matrix& x_;
  const std::vector<double>& y_;
  const std::vector<double>* h_;
  Criterion crit_;
  const TreeParams& params_;
  std::size_t mtry_;
  std::mt19937_64& rng_;
  std::vector<std::size_t> features_;
  bool presorted_ = false;
  Tree tree_;
};

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double forest_vote(double leaf) { return leaf > 0.5 ? 1.0 : (leaf < 0.5 ? 0.0 : 0.5); }

}  // namespace

std::vector<double> feature_medians(const LabeledDataset& data) {
  std::vector<double> med(data.width(), 0.0);
  std::vector<double> col;
  for (std::size_t c = 0; c < data.width(); ++c) {
    col.clear();
    for (const auto& r : data.rows)
      if (!std::isnan(r.features[c])) col.push_back(r.features[c]);
    if (col.empty()) continue;
    std::sort(col.begin(), col.end());
    const std::size_t n = col.size();
    med[c] = n % 2 ? col[n / 2] : 0.5 * (col[n / 2 - 1] + col[n / 2]);
  }
  return med;
}

Model train_model(ModelFamily family, const LabeledDataset& train, const TreeParams& params, std::uint64_t seed,
                  unsigned threads) {
  train.validate();
  if (train.size() == 0 || train.count(kHealthy) == 0 || train.count(kDisease) == 0)
    throw Error(ErrorCode::InvalidArgument, "training set must contain both classes");
  if (params.n_trees < 1 || params.min_leaf < 1 || params.max_depth < 0)
    throw Error(ErrorCode::InvalidArgument, "invalid tree hyperparameters");

  Model m;
  m.family_ = family;
  m.params_ = params;
  m.seed_ = seed;
  m.feature_names_ = train.feature_names;
  m.impute_ = feature_medians(train);
  const Matrix x = imputed_matrix(train, m.impute_);
  std::vector<double> y(train.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = train.rows[i].label == kDisease ? 1.0 : 0.0;
  const std::size_t width = train.width();
  const auto n_trees = static_cast<std::size_t>(params.n_trees);

  if (family == ModelFamily::RandomForest) {
    const std::size_t mtry =
        params.max_features > 0
            ? std::min<std::size_t>(static_cast<std::size_t>(params.max_features), width)
            : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(width))));
    m.trees_.resize(n_trees);
    parallel_for(
        n_trees,
        [&](std::size_t t) {
          std::mt19937_64 rng(derive_seed(seed, t));
          std::uniform_int_distribution<std::size_t> draw(0, x.rows - 1);
          std::vector<std::size_t> sample(x.rows);
          for (auto& s : sample) s = draw(rng);
          TreeBuilder b(x, y, nullptr, TreeBuilder::Criterion::Gini, params, mtry, rng);
          m.trees_[t] = b.build(std::move(sample));
        },
        threads);
    return m;
  }

  if (!(params.learning_rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "learning_rate must be positive");
  const std::size_t mtry = params.max_features > 0
                               ? std::min<std::size_t>(static_cast<std::size_t>(params.max_features), width)
                               : width;
  const double prior = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  m.base_score_ = std::log(prior / (1.0 - prior));
  std::vector<double> score(y.size(), m.base_score_), resid(y.size()), hess(y.size());
  std::vector<std::size_t> all(y.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  m.trees_.reserve(n_trees);
  for (std::size_t t = 0; t < n_trees; ++t) {
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double p = sigmoid(score[i]);
      resid[i] = y[i] - p;
      hess[i] = p * (1.0 - p);
    }
    std::mt19937_64 rng(derive_seed(seed, t));
    TreeBuilder b(x, resid, &hess, TreeBuilder::Criterion::SquaredError, params, mtry, rng);
    Tree tree = b.build(all);
    for (std::size_t i = 0; i < y.size(); ++i)
      score[i] += params.learning_rate * tree.evaluate(std::span<const double>(&x.data[i * x.cols], x.cols));
    m.trees_.push_back(std::move(tree));
  }
  return m;
}

Model train_random_forest(const LabeledDataset& train, const TreeParams& params, std::uint64_t seed,
                          unsigned threads) {
  return train_model(ModelFamily::RandomForest, train, params, seed, threads);
}

Model train_gbt(const LabeledDataset& train, const TreeParams& params, std::uint64_t seed, unsigned threads) {
  return train_model(ModelFamily::GradientBoosting, train, params, seed, threads);
}

double Model::predict_proba(std::span<const double> x) const {
  if (x.size() != impute_.size()) throw Error(ErrorCode::DimensionMismatch, "predict: wrong feature width");
  std::vector<double> row(x.begin(), x.end());
  for (std::size_t i = 0; i < row.size(); ++i)
    if (std::isnan(row[i])) row[i] = impute_[i];
  if (family_ == ModelFamily::RandomForest) {
    double votes = 0.0;
    for (const auto& t : trees_) votes += forest_vote(t.evaluate(row));
    return votes / static_cast<double>(trees_.size());
  }
  double z = base_score_;
  for (const auto& t : trees_) z += params_.learning_rate * t.evaluate(row);
  return sigmoid(z);
}

std::vector<double> Model::predict_proba(const LabeledDataset& data) const {
  std::vector<double> p;
  p.reserve(data.size());
  for (const auto& r : data.rows) p.push_back(predict_proba(r.features));
  return p;
}

std::vector<int> Model::predict(const LabeledDataset& data) const {
  std::vector<int> out;
  out.reserve(data.size());
  for (double p : predict_proba(data)) out.push_back(p >= 0.5 ? kDisease : kHealthy);
  return out;
}

nlohmann::json Model::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    trees.push_back(std::move(nodes));
  }
  return nlohmann::json{{"format", "periorbital-model"},
                        {"version", 1},
                        {"family", to_string(family_)},
                        {"seed", seed_},
                        {"params", periorbital::to_json(params_)},
                        {"feature_names", feature_names_},
                        {"impute", impute_},
                        {"base_score", base_score_},
                        {"node_layout", {"feature", "threshold", "left", "right", "value"}},
                        {"trees", std::move(trees)}};
}

Model Model::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "periorbital-model") throw Error(ErrorCode::Parse, "not a periorbital model file");
    if (j.at("version").get<int>() != 1) throw Error(ErrorCode::Parse, "unsupported model version");
    Model m;
    m.family_ = parse_model_family(j.at("family").get<std::string>());
    m.seed_ = j.at("seed").get<std::uint64_t>();
    m.params_ = tree_params_from_json(j.at("params"));
    m.feature_names_ = j.at("feature_names").get<std::vector<std::string>>();
    m.impute_ = j.at("impute").get<std::vector<double>>();
    m.base_score_ = j.at("base_score").get<double>();
    const auto n_nodes_max = static_cast<int>(1 << 30);
    for (const auto& jt : j.at("trees")) {
      Tree t;
      for (const auto& jn : jt)
        t.nodes.push_back(TreeNode{jn.at(0).get<int>(), jn.at(1).get<double>(), jn.at(2).get<int>(),
                                   jn.at(3).get<int>(), jn.at(4).get<double>()});
      const int n = static_cast<int>(t.nodes.size());
      if (n == 0 || n > n_nodes_max) throw Error(ErrorCode::Parse, "model tree has no nodes");
      for (int i = 0; i < n; ++i) {
        const TreeNode& node = t.nodes[static_cast<std::size_t>(i)];
        if (node.feature < 0) continue;
        if (node.feature >= static_cast<int>(m.impute_.size()) || node.left <= i || node.right <= i ||
            node.left >= n || node.right >= n)
          throw Error(ErrorCode::Parse, "model tree node is malformed");
      }
      m.trees_.push_back(std::move(t));
    }
    if (m.trees_.empty()) throw Error(ErrorCode::Parse, "model has no trees");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("model JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

GridResult grid_search(ModelFamily family, const std::vector<TreeParams>& grid, const LabeledDataset& train,
                       int folds, std::uint64_t seed, unsigned threads) {
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "grid_search: empty grid");
  if (folds < 2) throw Error(ErrorCode::InvalidArgument, "grid_search: need at least 2 folds");
  train.validate();

  // Stratified, group-preserving fold assignment.
  auto groups = groups_by_label(train);
  std::map<std::string, int> fold_of;
  for (auto& [label, keys] : groups) {
    std::mt19937_64 rng(derive_seed(seed ^ 0xF01DULL, static_cast<std::uint64_t>(label)));
    std::shuffle(keys.begin(), keys.end(), rng);
    for (std::size_t i = 0; i < keys.size(); ++i) fold_of[keys[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
  }
  std::vector<LabeledDataset> fit(static_cast<std::size_t>(folds)), held(static_cast<std::size_t>(folds));
  for (int k = 0; k < folds; ++k) {
    fit[k].feature_names = held[k].feature_names = train.feature_names;
    for (const auto& r : train.rows)
      (fold_of.at(r.group.empty() ? r.id : r.group) == k ? held[k] : fit[k]).rows.push_back(r);
    if (held[k].size() < 2) throw Error(ErrorCode::InvalidArgument, "grid_search: a fold has fewer than 2 samples");
  }

  GridResult result;
  result.table.resize(grid.size());
  const std::size_t tasks = grid.size() * static_cast<std::size_t>(folds);
  std::vector<double> acc(tasks);
  parallel_for(
      tasks,
      [&](std::size_t t) {
        const std::size_t g = t / static_cast<std::size_t>(folds);
        const std::size_t k = t % static_cast<std::size_t>(folds);
        const Model m = train_model(family, fit[k], grid[g], derive_seed(seed, 1000 + k), 1);
        acc[t] = metrics(m.predict(held[k]), [&] {
                   std::vector<int> l;
                   for (const auto& r : held[k].rows) l.push_back(r.label);
                   return l;
                 }()).accuracy;
      },
      threads);

  for (std::size_t g = 0; g < grid.size(); ++g) {
    GridPoint& p = result.table[g];
    p.index = g;
    p.params = grid[g];
    p.fold_accuracy.assign(acc.begin() + static_cast<std::ptrdiff_t>(g * folds),
                           acc.begin() + static_cast<std::ptrdiff_t>((g + 1) * folds));
    p.mean_accuracy = std::accumulate(p.fold_accuracy.begin(), p.fold_accuracy.end(), 0.0) / folds;
  }
  const auto depth_key = [](int d) { return d == 0 ? std::numeric_limits<int>::max() : d; };
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const auto& a = result.table[g];
    const auto& b = result.table[best];
    if (a.mean_accuracy > b.mean_accuracy ||
        (a.mean_accuracy == b.mean_accuracy &&
         std::tuple(a.params.n_trees, depth_key(a.params.max_depth)) <
             std::tuple(b.params.n_trees, depth_key(b.params.max_depth))))
      best = g;
  }
  result.best_index = best;
  result.best = grid[best];
  return result;
}

std::vector<TreeParams> default_grid(ModelFamily family) {
  nlohmann::json j = {{"n_trees", {100, 300}}, {"max_depth", {4, 8, nullptr}}, {"min_leaf", {1, 5}}};
  // Boosting wants weak learners; unlimited depth would just memorize.
  if (family == ModelFamily::GradientBoosting) {
    j["max_depth"] = {2, 3, 5};
    j["learning_rate"] = {0.1, 0.3};
  }
  return grid_from_json(j, family);
}

std::vector<TreeParams> grid_from_json(const nlohmann::json& j, ModelFamily family) {
  const TreeParams d;
  const auto list = [&](const char* key, nlohmann::json fallback) {
    if (!j.contains(key)) return nlohmann::json::array({fallback});
    const auto& v = j.at(key);
    if (!v.is_array() || v.empty()) throw Error(ErrorCode::Parse, std::string("grid key '") + key + "' must be a non-empty array");
    return v;
  };
  try {
    const auto trees = list("n_trees", d.n_trees);
    const auto depths = list("max_depth", d.max_depth);
    const auto leaves = list("min_leaf", d.min_leaf);
    const auto rates = family == ModelFamily::GradientBoosting ? list("learning_rate", d.learning_rate)
                                                               : nlohmann::json::array({d.learning_rate});
    const auto feats = list("max_features", d.max_features);
    std::vector<TreeParams> grid;
    for (const auto& t : trees)
      for (const auto& dep : depths)
        for (const auto& l : leaves)
          for (const auto& r : rates)
            for (const auto& f : feats) {
              TreeParams p;
              p.n_trees = t.get<int>();
              p.max_depth = dep.is_null() ? 0 : dep.get<int>();
              p.min_leaf = l.get<int>();
              p.learning_rate = r.get<double>();
              p.max_features = f.get<int>();
              grid.push_back(p);
            }
    return grid;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("grid JSON: ") + e.what());
  }
}

ClassMetrics metrics(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size() || labels.empty())
    throw Error(ErrorCode::DimensionMismatch, "metrics: predictions and labels must be equal, non-empty lengths");
  ClassMetrics m;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool p = predictions[i] == kDisease, t = labels[i] == kDisease;
    if (p && t) ++m.tp;
    else if (!p && !t) ++m.tn;
    else if (p) ++m.fp;
    else ++m.fn;
  }
  m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(labels.size());
  m.precision_defined = m.tp + m.fp > 0;
  m.recall_defined = m.tp + m.fn > 0;
  m.precision = m.precision_defined ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp) : 0.0;
  m.recall = m.recall_defined ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn) : 0.0;
  return m;
}

double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw Error(ErrorCode::DimensionMismatch, "auroc: length mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Average ranks (1-based) over runs of tied scores.
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  double pos = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (labels[i] == kDisease) {
      pos += 1.0;
      rank_sum += rank[i];
    }
  const double neg = static_cast<double>(n) - pos;
  if (pos == 0.0 || neg == 0.0) throw Error(ErrorCode::InvalidArgument, "auroc: both classes must be present");
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

}  // namespace periorbital
