#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "classify.hpp"
#include "core.hpp"

namespace periorbital::batch {

namespace fs = std::filesystem;

// Receives one human-readable line per call.
using Log = std::function<void(const std::string&)>;

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitPartial = 2;

enum class UnitSelection { Px, Mm, Both };

struct MeasureArgs {
  fs::path manifest;
  fs::path out_csv;
  UnitSelection units = UnitSelection::Both;
  bool normalize = true;
  unsigned threads = 0;
};

// One row per face per unit system, in manifest order. Faces that cannot be
// loaded are listed in "<out stem>_errors.csv" next to the output.
int cmd_measure(const MeasureArgs& args, const Log& log);

struct DiceArgs {
  fs::path pred_manifest;
  fs::path truth_manifest;
  fs::path out_csv;
  unsigned threads = 0;
};

// Per-face Dice per class, plus "<out stem>_summary.csv" with the median and
// quartiles per dataset tag (and "all").
int cmd_dice(const DiceArgs& args, const Log& log);

struct EvaluateArgs {
  fs::path pred_csv;
  fs::path truth_csv;
  fs::path out_dir;
  bool bilateral_average = false;
  bool filter_brow_outliers = false;
  std::optional<fs::path> exclude_ids;
  // Second prediction set scored on the ids where it succeeded.
  std::optional<fs::path> baseline_csv;
};

// Writes mae.csv, agreement.csv, plots/<units>_<feature>.svg and, with a
// baseline, subset.csv.
int cmd_evaluate(const EvaluateArgs& args, const Log& log);

struct ClassifyArgs {
  fs::path features_csv;
  fs::path labels_csv;
  fs::path out_dir;
  ModelFamily model = ModelFamily::RandomForest;
  std::optional<fs::path> grid;
  std::uint64_t seed = 0;
  double split = 0.8;
  int folds = 5;
  Units units = Units::Mm;
  unsigned threads = 0;
};

// Split, augment the training part, grid search, refit, score the held-out
// part. Writes metrics.csv, model.json, cv.csv and predictions.csv.
int cmd_classify(const ClassifyArgs& args, const Log& log);

struct SynthArgs {
  std::size_t n = 0;
  double disease_fraction = 0.5;
  std::uint64_t seed = 0;
  fs::path out_dir;
  unsigned threads = 0;
};

// Writes masks/, landmarks/, manifest.csv, truth.csv (px and mm) and labels.csv.
int cmd_synth(const SynthArgs& args, const Log& log);

}  // namespace periorbital::batch
