// Command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <cstring>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "periorbital/periorbital.h"

namespace {

// Errors and warnings go to stderr, everything else to stdout.
void print_line(const char* line, void*) {
  const bool problem = std::strncmp(line, "error:", 6) == 0 || std::strncmp(line, "warning:", 8) == 0;
  std::fputs(line, problem ? stderr : stdout);
  std::fputc('\n', problem ? stderr : stdout);
}

const char* opt_c_str(const std::optional<std::string>& s) { return s ? s->c_str() : nullptr; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periorbital measurements from segmentation masks"};
  app.set_version_flag("--version", std::string(po_version()));
  app.require_subcommand(1);
  int code = 0;

  // measure
  std::string m_manifest, m_out, m_units = "both";
  bool m_no_normalize = false;
  auto* measure = app.add_subcommand("measure", "Compute the 36 features for every face in a manifest");
  measure->add_option("manifest", m_manifest, "Manifest CSV")->required();
  measure->add_option("out_csv", m_out, "Measurement CSV to write")->required();
  measure->add_option("--units", m_units, "px, mm or both")
      ->check(CLI::IsMember({"px", "mm", "both"}))
      ->capture_default_str();
  measure->add_flag("--no-normalize", m_no_normalize, "Skip the upright rotation about the nasion");
  measure->callback([&] {
    po_measure_args a;
    po_measure_args_init(&a);
    a.manifest = m_manifest.c_str();
    a.out_csv = m_out.c_str();
    a.units = m_units == "px" ? PO_UNITS_PX : m_units == "mm" ? PO_UNITS_MM : PO_UNITS_BOTH;
    a.normalize = m_no_normalize ? 0 : 1;
    code = po_run_measure(&a, print_line, nullptr);
  });

  // dice
  std::string d_pred, d_truth, d_out;
  auto* dice = app.add_subcommand("dice", "Per-face, per-class Dice between two manifests");
  dice->add_option("pred_manifest", d_pred)->required();
  dice->add_option("truth_manifest", d_truth)->required();
  dice->add_option("out_csv", d_out)->required();
  dice->callback([&] {
    po_dice_args a;
    po_dice_args_init(&a);
    a.pred_manifest = d_pred.c_str();
    a.truth_manifest = d_truth.c_str();
    a.out_csv = d_out.c_str();
    code = po_run_dice(&a, print_line, nullptr);
  });

  // evaluate
  std::string e_pred, e_truth, e_out;
  std::optional<std::string> e_exclude, e_baseline;
  bool e_bilateral = false, e_filter = false;
  auto* evaluate = app.add_subcommand("evaluate", "MAE and Bland-Altman agreement against reference measurements");
  evaluate->add_option("pred_csv", e_pred)->required();
  evaluate->add_option("truth_csv", e_truth)->required();
  evaluate->add_option("out_dir", e_out)->required();
  evaluate->add_flag("--bilateral-average", e_bilateral, "Average left and right before scoring");
  evaluate->add_flag("--filter-brow-outliers", e_filter, "Drop brow errors above mean + 1 SD before the MAE");
  evaluate->add_option("--exclude-ids", e_exclude, "File with one id per line to leave out");
  evaluate->add_option("--baseline", e_baseline, "Second prediction CSV compared on its successful ids");
  evaluate->callback([&] {
    po_evaluate_args a;
    po_evaluate_args_init(&a);
    a.pred_csv = e_pred.c_str();
    a.truth_csv = e_truth.c_str();
    a.out_dir = e_out.c_str();
    a.bilateral_average = e_bilateral;
    a.filter_brow_outliers = e_filter;
    a.exclude_ids = opt_c_str(e_exclude);
    a.baseline_csv = opt_c_str(e_baseline);
    code = po_run_evaluate(&a, print_line, nullptr);
  });

  // classify
  std::string c_features, c_labels, c_out = "classify_out", c_model = "rf", c_units = "mm";
  std::optional<std::string> c_grid;
  std::uint64_t c_seed = 0;
  double c_split = 0.8;
  int c_folds = 5;
  auto* classify = app.add_subcommand("classify", "Train and test a healthy/disease tree ensemble");
  classify->add_option("features_csv", c_features)->required();
  classify->add_option("labels_csv", c_labels)->required();
  classify->add_option("-o,--out", c_out, "Output directory")->capture_default_str();
  classify->add_option("--model", c_model)->check(CLI::IsMember({"rf", "gbt"}))->capture_default_str();
  classify->add_option("--grid", c_grid, "JSON hyperparameter grid");
  classify->add_option("--seed", c_seed)->capture_default_str();
  classify->add_option("--split", c_split, "Training fraction")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  classify->add_option("--folds", c_folds)->check(CLI::Range(2, 100))->capture_default_str();
  classify->add_option("--units", c_units)->check(CLI::IsMember({"px", "mm"}))->capture_default_str();
  classify->callback([&] {
    po_classify_args a;
    po_classify_args_init(&a);
    a.features_csv = c_features.c_str();
    a.labels_csv = c_labels.c_str();
    a.out_dir = c_out.c_str();
    a.model = c_model == "gbt" ? PO_MODEL_GBT : PO_MODEL_RF;
    a.grid = opt_c_str(c_grid);
    a.seed = c_seed;
    a.split = c_split;
    a.folds = c_folds;
    a.units = c_units == "px" ? PO_PX : PO_MM;
    code = po_run_classify(&a, print_line, nullptr);
  });

  // synth
  std::size_t s_n = 0;
  double s_fraction = 0.5;
  std::uint64_t s_seed = 0;
  std::string s_out;
  auto* synth = app.add_subcommand("synth", "Render a seeded synthetic population with analytic truth");
  synth->add_option("-n,--n", s_n, "Number of faces")->required();
  synth->add_option("--disease-fraction", s_fraction)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  synth->add_option("--seed", s_seed)->capture_default_str();
  synth->add_option("out_dir", s_out)->required();
  synth->callback([&] {
    po_synth_args a;
    po_synth_args_init(&a);
    a.n = s_n;
    a.disease_fraction = s_fraction;
    a.seed = s_seed;
    a.out_dir = s_out.c_str();
    code = po_run_synth(&a, print_line, nullptr);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  return code;
}
