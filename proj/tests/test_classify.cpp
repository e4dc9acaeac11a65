#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "classify.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace periorbital;

namespace {

LabeledDataset registry_dataset(std::size_t per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  LabeledDataset d;
  d.feature_names = feature_registry();
  for (int label : {kHealthy, kDisease})
    for (std::size_t i = 0; i < per_class; ++i) {
      LabeledRow r;
      r.label = label;
      r.id = (label ? "d" : "h") + std::to_string(i);
      r.group = r.id;
      for (std::size_t k = 0; k < kFeatureCount; ++k) r.features.push_back(g(rng) + (k % 3 == 0 ? 1.5 * label : 0.0));
      d.rows.push_back(r);
    }
  return d;
}

// Two features, classes separated by x0 + x1 > 0.
LabeledDataset toy(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  LabeledDataset d;
  d.feature_names = {"a", "b"};
  while (d.size() < n) {
    const double a = u(rng), b = u(rng);
    if (std::fabs(a + b) < 0.05) continue;
    LabeledRow r;
    r.features = {a, b};
    r.label = a + b > 0 ? kDisease : kHealthy;
    r.id = r.group = "t" + std::to_string(d.size());
    d.rows.push_back(r);
  }
  return d;
}

// XOR of signs: no single split helps, depth 2 is required.
LabeledDataset xor_set(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  LabeledDataset d;
  d.feature_names = {"a", "b"};
  for (std::size_t i = 0; i < n; ++i) {
    LabeledRow r;
    r.features = {u(rng), u(rng)};
    r.label = (r.features[0] > 0) != (r.features[1] > 0) ? kDisease : kHealthy;
    r.id = r.group = "x" + std::to_string(i);
    d.rows.push_back(r);
  }
  return d;
}

double accuracy(const Model& m, const LabeledDataset& d) {
  const auto p = m.predict(d);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < d.size(); ++i) ok += p[i] == d.rows[i].label;
  return static_cast<double>(ok) / static_cast<double>(d.size());
}

double auroc_oracle(const std::vector<double>& s, const std::vector<int>& y) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (y[i] == 1 && y[j] == 0) {
        den += 1;
        num += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
  return num / den;
}

}  // namespace

TEST_CASE("swap_lr and augmentation") {
  const LabeledDataset d = registry_dataset(10, 1);
  const LabeledDataset a = augment_swap_lr(d);
  CHECK(a.size() == 2 * d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(a.rows[i].features == d.rows[i].features);
    const LabeledRow& twin = a.rows[d.size() + i];
    CHECK(twin.group == d.rows[i].group);
    CHECK(twin.label == d.rows[i].label);
    for (std::size_t k = 0; k < kFeatureCount; ++k) CHECK(twin.features[k] == d.rows[i].features[mirror_feature_index(k)]);
    CHECK(swap_lr(swap_lr(d.rows[i])).features == d.rows[i].features);
  }
  LabeledRow sym = d.rows[0];
  for (std::size_t k = 0; k < 16; ++k) sym.features[16 + k] = sym.features[k];
  CHECK(swap_lr(sym).features == sym.features);
}

TEST_CASE("stratified grouped split") {
  const LabeledDataset d = registry_dataset(50, 2);
  const TrainTestSplit s = split_train_test(d, 0.8, 7);
  CHECK(s.train.size() == 80);
  CHECK(s.test.size() == 20);
  CHECK(s.train.count(kHealthy) == 40);
  CHECK(s.train.count(kDisease) == 40);
  CHECK(s.test.count(kHealthy) == 10);
  CHECK(s.test.count(kDisease) == 10);
  const TrainTestSplit again = split_train_test(d, 0.8, 7);
  for (std::size_t i = 0; i < s.test.size(); ++i) CHECK(s.test.rows[i].id == again.test.rows[i].id);

  // Twins never straddle the boundary.
  const TrainTestSplit aug = split_train_test(augment_swap_lr(d), 0.8, 7);
  std::set<std::string> train_groups;
  for (const auto& r : aug.train.rows) train_groups.insert(r.group);
  for (const auto& r : aug.test.rows) CHECK_FALSE(train_groups.count(r.group));
  CHECK_THROWS_AS(split_train_test(registry_dataset(2, 1), 0.8, 1), Error);
}

TEST_CASE("separable toy set is learned exactly") {
  const LabeledDataset d = toy(200, 3);
  for (ModelFamily f : {ModelFamily::RandomForest, ModelFamily::GradientBoosting}) {
    TreeParams p;
    p.n_trees = 50;
    p.max_depth = f == ModelFamily::GradientBoosting ? 3 : 0;
    const Model m = train_model(f, d, p, 11);
    CHECK(accuracy(m, d) == 1.0);
  }
}

TEST_CASE("training is deterministic and thread independent") {
  const LabeledDataset d = registry_dataset(40, 4);
  const LabeledDataset test = registry_dataset(20, 99);
  for (ModelFamily f : {ModelFamily::RandomForest, ModelFamily::GradientBoosting}) {
    TreeParams p;
    p.n_trees = 30;
    p.max_depth = 4;
    const Model a = train_model(f, d, p, 5, 1);
    const Model b = train_model(f, d, p, 5, 4);
    CHECK(a.predict_proba(test) == b.predict_proba(test));
    CHECK(a.to_json() == b.to_json());
    const Model c = train_model(f, d, p, 6, 1);
    if (f == ModelFamily::RandomForest) CHECK(a.to_json() != c.to_json());
  }
}

TEST_CASE("decisions depend only on feature order") {
  // x -> x^3 is strictly increasing, so every split partitions the same rows.
  const LabeledDataset d = registry_dataset(40, 8);
  const LabeledDataset test = registry_dataset(15, 77);
  const auto cube = [](LabeledDataset x) {
    for (auto& r : x.rows)
      for (double& v : r.features) v = v * v * v;
    return x;
  };
  for (ModelFamily f : {ModelFamily::RandomForest, ModelFamily::GradientBoosting}) {
    TreeParams p;
    p.n_trees = 25;
    p.max_depth = 5;
    const Model a = train_model(f, d, p, 3);
    const Model b = train_model(f, cube(d), p, 3);
    CHECK(a.predict_proba(test) == b.predict_proba(cube(test)));
  }
}

TEST_CASE("missing values take the training median") {
  LabeledDataset d = toy(100, 9);
  d.rows[0].features[1] = std::nan("");
  const Model m = train_model(ModelFamily::RandomForest, d, TreeParams{}, 1);
  const std::vector<double> probe = {0.5, std::nan("")};
  const std::vector<double> filled = {0.5, m.imputation()[1]};
  CHECK(m.predict_proba(probe) == m.predict_proba(filled));
  CHECK(feature_medians(d)[1] == m.imputation()[1]);
}

TEST_CASE("model JSON round-trip") {
  const LabeledDataset d = registry_dataset(30, 10);
  for (ModelFamily f : {ModelFamily::RandomForest, ModelFamily::GradientBoosting}) {
    TreeParams p;
    p.n_trees = 10;
    p.max_depth = 3;
    const Model m = train_model(f, d, p, 2);
    const Model back = Model::from_json(nlohmann::json::parse(m.to_json().dump()));
    CHECK(back.predict_proba(d) == m.predict_proba(d));
    CHECK(back.family() == f);
  }
  CHECK_THROWS_AS(Model::from_json(nlohmann::json::object()), Error);
}

TEST_CASE("grid search") {
  const LabeledDataset x = xor_set(200, 12);
  TreeParams stump, deep;
  stump.n_trees = deep.n_trees = 20;
  stump.max_depth = 1;
  deep.max_depth = 0;
  const GridResult single = grid_search(ModelFamily::RandomForest, {deep}, x, 5, 1);
  CHECK(single.best_index == 0);
  CHECK(single.table.size() == 1);
  CHECK(single.table[0].fold_accuracy.size() == 5);

  const GridResult r = grid_search(ModelFamily::RandomForest, {stump, deep}, x, 5, 1);
  CHECK(r.best_index == 1);
  CHECK(r.best.max_depth == 0);
  const GridResult again = grid_search(ModelFamily::RandomForest, {stump, deep}, x, 5, 1);
  for (std::size_t i = 0; i < r.table.size(); ++i) CHECK(r.table[i].fold_accuracy == again.table[i].fold_accuracy);
  CHECK_THROWS_AS(grid_search(ModelFamily::RandomForest, {}, x, 5, 1), Error);
}

TEST_CASE("grid from JSON") {
  const auto g = grid_from_json(nlohmann::json::parse(R"({"n_trees":[10,20],"max_depth":[null,3]})"),
                                ModelFamily::RandomForest);
  REQUIRE(g.size() == 4);
  CHECK(g[0].n_trees == 10);
  CHECK(g[0].max_depth == 0);
  CHECK(g[3].max_depth == 3);
  CHECK_THROWS_AS(grid_from_json(nlohmann::json::parse(R"({"n_trees":[]})"), ModelFamily::RandomForest), Error);
  CHECK_FALSE(default_grid(ModelFamily::GradientBoosting).empty());
}

TEST_CASE("metrics examples") {
  const ClassMetrics a = metrics({1, 0}, {1, 0});
  CHECK(a.accuracy == 1.0);
  CHECK(a.precision == 1.0);
  CHECK(a.recall == 1.0);
  std::vector<int> pred, lab;
  const auto add = [&](int p, int l, int n) {
    for (int i = 0; i < n; ++i) {
      pred.push_back(p);
      lab.push_back(l);
    }
  };
  add(1, 1, 8);
  add(0, 0, 9);
  add(1, 0, 1);
  add(0, 1, 2);
  const ClassMetrics b = metrics(pred, lab);
  CHECK(b.accuracy == 0.85);
  CHECK(b.precision == 8.0 / 9.0);
  CHECK(b.recall == 0.8);
  const ClassMetrics c = metrics({0, 0, 0}, {1, 0, 1});
  CHECK(c.recall == 0.0);
  CHECK_FALSE(c.precision_defined);
  CHECK_THROWS_AS(metrics({}, {}), Error);
  CHECK_THROWS_AS(metrics({1}, {1, 0}), Error);
}

TEST_CASE("metrics match every confusion matrix with entries up to 20") {
  for (int tp = 0; tp <= 20; ++tp)
    for (int tn = 0; tn <= 20; ++tn)
      for (int fp = 0; fp <= 20; ++fp)
        for (int fn = 0; fn <= 20; ++fn) {
          const int n = tp + tn + fp + fn;
          if (n == 0) continue;
          std::vector<int> pred, lab;
          pred.reserve(n);
          lab.reserve(n);
          pred.insert(pred.end(), tp, 1), lab.insert(lab.end(), tp, 1);
          pred.insert(pred.end(), tn, 0), lab.insert(lab.end(), tn, 0);
          pred.insert(pred.end(), fp, 1), lab.insert(lab.end(), fp, 0);
          pred.insert(pred.end(), fn, 0), lab.insert(lab.end(), fn, 1);
          const ClassMetrics m = metrics(pred, lab);
          REQUIRE(m.tp == static_cast<std::size_t>(tp));
          REQUIRE(m.fn == static_cast<std::size_t>(fn));
          REQUIRE(m.accuracy == static_cast<double>(tp + tn) / n);
          REQUIRE(m.precision == (tp + fp ? static_cast<double>(tp) / (tp + fp) : 0.0));
          REQUIRE(m.recall == (tp + fn ? static_cast<double>(tp) / (tp + fn) : 0.0));
          REQUIRE(m.precision_defined == (tp + fp > 0));
          REQUIRE(m.recall_defined == (tp + fn > 0));
        }
}

TEST_CASE("auroc") {
  CHECK(auroc({0.1, 0.2, 0.8, 0.9}, {0, 0, 1, 1}) == 1.0);
  CHECK(auroc({0.5, 0.5, 0.5, 0.5}, {0, 1, 0, 1}) == 0.5);
  CHECK(auroc({0.1, 0.4, 0.35, 0.8}, {0, 0, 1, 1}) == 0.75);
  CHECK_THROWS_AS(auroc({0.1, 0.2}, {1, 1}), Error);

  std::mt19937_64 rng(31);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng() % 80;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(rng() % 2);
      s[i] = static_cast<double>(rng() % 12) / 11.0 + 0.1 * y[i];  // plenty of ties
    }
    y[0] = 0;
    y[1] = 1;
    CHECK(std::fabs(auroc(s, y) - auroc_oracle(s, y)) <= 1e-12);
  }
}
