#include "batch.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "anthro.hpp"
#include "csv.hpp"
#include "io.hpp"
#include "json.hpp"
#include "maskgeom.hpp"
#include "parallel.hpp"
#include "prep.hpp"
#include "report.hpp"
#include "stats.hpp"
#include "synth.hpp"

namespace periorbital::batch {

namespace {

using io::format_double;

template <class Fn>
int guarded(const Log& log, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    log(std::string("error: ") + e.what());
    return kExitFailure;
  }
}

std::ofstream open_report(const fs::path& path) {
  if (path.has_parent_path()) io::ensure_directory(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out = open_report(path);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

fs::path sibling(const fs::path& file, const std::string& suffix) {
  return file.parent_path() / (file.stem().string() + suffix);
}

// Writes "id,error" rows next to `out`, or removes a stale file when clean.
void write_error_table(const fs::path& path, const std::vector<std::pair<std::string, std::string>>& errors) {
  if (errors.empty()) {
    std::error_code ec;
    fs::remove(path, ec);
    return;
  }
  std::ofstream out = open_report(path);
  out << "id,error\n";
  for (const auto& [id, msg] : errors) out << csv::escape(id) << ',' << csv::escape(msg) << '\n';
}

std::string row_key(const std::string& id, Units u) { return id + '\x1f' + std::string(to_string(u)); }

std::set<std::string> read_id_list(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::set<std::string> ids;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = csv::split_line(line);
    const bool header = first && !fields.empty() && fields[0] == "id";
    first = false;
    if (header || fields.empty() || fields[0].empty() || fields[0].front() == '#') continue;
    ids.insert(fields[0]);
  }
  return ids;
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_measure(const MeasureArgs& args, const Log& log) {
  return guarded(log, [&] {
    const io::Manifest manifest = io::read_manifest(args.manifest);
    const std::size_t n = manifest.entries.size();
    struct Result {
      std::optional<FaceMeasurement> measured;
      std::vector<std::string> missing;
      std::string error;
    };
    std::vector<Result> results(n);
    parallel_for(
        n,
        [&](std::size_t i) {
          try {
            io::LoadedFace loaded = io::load_face(manifest, manifest.entries[i]);
            results[i].missing = std::move(loaded.missing);
            const FaceRecord face = args.normalize ? normalize_orientation(loaded.face).first : loaded.face;
            results[i].measured = measure_face(face);
          } catch (const std::exception& e) {
            results[i].error = e.what();
          }
        },
        args.threads);

    std::vector<MeasurementRow> rows;
    std::vector<std::pair<std::string, std::string>> errors;
    bool partial = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string& id = manifest.entries[i].id;
      const Result& r = results[i];
      if (!r.measured) {
        log("error: " + id + ": " + r.error);
        errors.emplace_back(id, r.error);
        partial = true;
        continue;
      }
      for (const auto& m : r.missing) log("warning: " + id + ": no " + m + " mask file, treated as empty");
      for (const auto& note : r.measured->notes) log("note: " + id + ": " + note);
      if (r.measured->px.valid_count() < kFeatureCount) partial = true;
      if (args.units != UnitSelection::Mm) rows.push_back({id, r.measured->px});
      if (args.units != UnitSelection::Px) rows.push_back({id, r.measured->mm});
    }
    io::write_measurements(args.out_csv, rows);
    write_error_table(sibling(args.out_csv, "_errors.csv"), errors);
    log("measured " + std::to_string(n - errors.size()) + " of " + std::to_string(n) + " faces");
    if (n > 0 && errors.size() == n) return kExitFailure;
    return partial ? kExitPartial : kExitOk;
  });
}

// ---------------------------------------------------------------------------

int cmd_dice(const DiceArgs& args, const Log& log) {
  return guarded(log, [&] {
    const io::Manifest truth = io::read_manifest(args.truth_manifest);
    const io::Manifest pred = io::read_manifest(args.pred_manifest);
    std::map<std::string, std::size_t> pred_index;
    for (std::size_t i = 0; i < pred.entries.size(); ++i) pred_index[pred.entries[i].id] = i;
    std::set<std::string> truth_ids;
    std::vector<std::string> offenders;
    for (const auto& e : truth.entries) {
      truth_ids.insert(e.id);
      if (!pred_index.count(e.id)) offenders.push_back(e.id + " (missing from predictions)");
    }
    for (const auto& e : pred.entries)
      if (!truth_ids.count(e.id)) offenders.push_back(e.id + " (not in truth)");
    if (!offenders.empty()) {
      std::string msg = "id mismatch between manifests:";
      for (const auto& o : offenders) msg += " " + o;
      throw Error(ErrorCode::InvalidArgument, msg);
    }

    static const std::array<std::string, 6> columns = {"right_sclera", "right_iris", "right_brow",
                                                       "left_sclera",  "left_iris",  "left_brow"};
    const std::size_t n = truth.entries.size();
    std::vector<std::optional<std::array<double, 6>>> scores(n);
    std::vector<std::string> face_errors(n);
    parallel_for(
        n,
        [&](std::size_t i) {
          try {
            const auto& te = truth.entries[i];
            const io::FaceMasks t = io::load_masks(truth, te);
            const io::FaceMasks p = io::load_masks(pred, pred.entries[pred_index.at(te.id)]);
            if (t.width != p.width || t.height != p.height)
              throw Error(ErrorCode::DimensionMismatch, "prediction and truth masks differ in size");
            std::array<double, 6> s{};
            for (std::size_t k = 0; k < 6; ++k) s[k] = dice(p.masks[k / 3][k % 3], t.masks[k / 3][k % 3]);
            scores[i] = s;
          } catch (const std::exception& e) {
            face_errors[i] = e.what();
          }
        },
        args.threads);

    std::ofstream out = open_report(args.out_csv);
    out << "id,dataset";
    for (const auto& c : columns) out << ',' << c;
    out << '\n';
    std::map<std::string, std::array<std::vector<double>, 6>> by_dataset;
    std::vector<std::pair<std::string, std::string>> errors;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& e = truth.entries[i];
      if (!scores[i]) {
        log("error: " + e.id + ": " + face_errors[i]);
        errors.emplace_back(e.id, face_errors[i]);
        continue;
      }
      out << csv::escape(e.id) << ',' << csv::escape(e.dataset);
      for (std::size_t k = 0; k < 6; ++k) {
        out << ',' << format_double((*scores[i])[k]);
        by_dataset[e.dataset][k].push_back((*scores[i])[k]);
        by_dataset["all"][k].push_back((*scores[i])[k]);
      }
      out << '\n';
    }
    if (!out) throw Error(ErrorCode::Io, "failed writing " + args.out_csv.string());
    write_error_table(sibling(args.out_csv, "_errors.csv"), errors);

    std::ofstream summary = open_report(sibling(args.out_csv, "_summary.csv"));
    summary << "dataset,class,n,median,q1,q3\n";
    for (const auto& [dataset, cols] : by_dataset)
      for (std::size_t k = 0; k < 6; ++k)
        summary << csv::escape(dataset) << ',' << columns[k] << ',' << cols[k].size() << ','
                << format_double(quantile(cols[k], 0.5)) << ',' << format_double(quantile(cols[k], 0.25)) << ','
                << format_double(quantile(cols[k], 0.75)) << '\n';
    log("scored " + std::to_string(n - errors.size()) + " of " + std::to_string(n) + " faces");
    if (n > 0 && errors.size() == n) return kExitFailure;
    return errors.empty() ? kExitOk : kExitPartial;
  });
}

// ---------------------------------------------------------------------------

namespace {

struct FeatureView {
  std::vector<std::string> names;
  std::vector<bool> brow;
  std::function<std::optional<double>(const MeasurementSet&, std::size_t)> value;
};

FeatureView feature_view(bool bilateral) {
  FeatureView v;
  if (bilateral) {
    v.names = bilateral_feature_names();
    for (const auto& n : v.names) v.brow.push_back(n.rfind("brow_", 0) == 0);
    v.value = [](const MeasurementSet& s, std::size_t k) { return bilateral_average(s).values[k]; };
  } else {
    v.names = feature_registry();
    for (std::size_t k = 0; k < v.names.size(); ++k) v.brow.push_back(is_brow_feature(k));
    v.value = [](const MeasurementSet& s, std::size_t k) { return s.get(k); };
  }
  return v;
}

std::string safe_file_part(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') ? c : '_';
  return out;
}

}  // namespace

int cmd_evaluate(const EvaluateArgs& args, const Log& log) {
  return guarded(log, [&] {
    const auto pred = io::read_measurements(args.pred_csv);
    const auto truth = io::read_measurements(args.truth_csv);
    std::set<std::string> excluded;
    if (args.exclude_ids) excluded = read_id_list(*args.exclude_ids);
    std::map<std::string, const MeasurementSet*> truth_by_key, base_by_key;
    for (const auto& r : truth) truth_by_key[row_key(r.id, r.set.units())] = &r.set;
    std::vector<MeasurementRow> baseline;
    if (args.baseline_csv) {
      baseline = io::read_measurements(*args.baseline_csv);
      for (const auto& r : baseline) base_by_key[row_key(r.id, r.set.units())] = &r.set;
    }

    const FeatureView view = feature_view(args.bilateral_average);
    io::ensure_directory(args.out_dir);
    std::ofstream mae_out = open_report(args.out_dir / "mae.csv");
    std::ofstream ba_out = open_report(args.out_dir / "agreement.csv");
    std::ofstream subset_out;
    mae_out << "units,feature,n,removed,mae,sd\n";
    ba_out << "units,feature,n,mean_diff,sd_diff,loa_low,loa_high,pct_outside\n";
    if (args.baseline_csv) {
      subset_out = open_report(args.out_dir / "subset.csv");
      subset_out << "units,feature,retained,total,coverage,mae,baseline_mae\n";
    }

    bool any_overlap = false;
    std::set<std::string> seen_pred;
    for (const Units units : {Units::Px, Units::Mm}) {
      struct Pair {
        const std::string* id;
        const MeasurementSet* pred;
        const MeasurementSet* truth;
      };
      std::vector<Pair> pairs;
      for (const auto& r : pred) {
        if (r.set.units() != units || excluded.count(r.id)) continue;
        if (!seen_pred.insert(row_key(r.id, units)).second)
          throw Error(ErrorCode::Parse, "duplicate prediction row for " + r.id + " (" + std::string(to_string(units)) + ")");
        const auto t = truth_by_key.find(row_key(r.id, units));
        if (t != truth_by_key.end()) pairs.push_back({&r.id, &r.set, t->second});
      }
      if (pairs.empty()) continue;
      any_overlap = true;
      const std::string u(to_string(units));

      for (std::size_t k = 0; k < view.names.size(); ++k) {
        const std::string& name = view.names[k];
        PairedSeries s;
        s.feature = name;
        s.units = units;
        PairedSeries base;
        base.feature = name;
        base.units = units;
        std::set<std::string> base_failures;
        for (const auto& p : pairs) {
          const auto a = view.value(*p.pred, k), b = view.value(*p.truth, k);
          if (!a || !b) continue;
          s.push(*p.id, *a, *b);
          if (args.baseline_csv) {
            const auto it = base_by_key.find(row_key(*p.id, units));
            const auto c = it == base_by_key.end() ? std::nullopt : view.value(*it->second, k);
            if (c)
              base.push(*p.id, *c, *b);
            else
              base_failures.insert(*p.id);
          }
        }

        std::size_t removed = 0;
        std::optional<MaeSummary> summary;
        if (s.size() > 0) {
          std::vector<double> errs = absolute_errors(s);
          if (args.filter_brow_outliers && view.brow[k]) {
            const OutlierFilter f = filter_outliers_1sd(errs);
            removed = f.removed;
            log("filter " + u + " " + name + ": removed " + std::to_string(removed) + " of " +
                std::to_string(errs.size()) + " (threshold " + format_double(f.threshold) + ")");
            errs = f.kept;
          }
          summary = mae(errs);
        }
        mae_out << u << ',' << name << ',' << s.size() << ',' << removed << ','
                << (summary ? format_double(summary->mean) : "nan") << ','
                << (summary ? format_double(summary->sd) : "nan") << '\n';

        if (s.size() >= 2) {
          const AgreementReport r = bland_altman(s);
          ba_out << u << ',' << name << ',' << r.n << ',' << format_double(r.mean_diff) << ','
                 << format_double(r.sd_diff) << ',' << format_double(r.loa_low) << ',' << format_double(r.loa_high)
                 << ',' << format_double(r.pct_outside) << '\n';
          write_text(args.out_dir / "plots" / (u + "_" + safe_file_part(name) + ".svg"),
                     bland_altman_svg(r, name + " (" + u + ")"));
        } else {
          ba_out << u << ',' << name << ',' << s.size() << ",nan,nan,nan,nan,nan\n";
        }

        if (args.baseline_csv) {
          std::optional<SubsetComparison> c;
          if (s.size() > 0 && base.size() > 0) {
            try {
              c = subset_compare(s, base, base_failures);
            } catch (const Error&) {
            }
          }
          if (c)
            subset_out << u << ',' << name << ',' << c->retained << ',' << c->total << ','
                       << format_double(c->coverage) << ',' << format_double(c->ours.mean) << ','
                       << format_double(c->baseline.mean) << '\n';
          else
            subset_out << u << ',' << name << ",0," << s.size() << ",0,nan,nan\n";
        }
      }
    }
    if (!any_overlap) throw Error(ErrorCode::InvalidArgument, "predictions and truth share no (id, units) rows");
    if (!mae_out || !ba_out) throw Error(ErrorCode::Io, "failed writing reports in " + args.out_dir.string());
    log("wrote reports to " + args.out_dir.string());
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------

int cmd_classify(const ClassifyArgs& args, const Log& log) {
  return guarded(log, [&] {
    const auto rows = io::read_measurements(args.features_csv);
    const auto labels = io::read_labels(args.labels_csv);
    std::map<std::string, int> label_of(labels.begin(), labels.end());

    LabeledDataset data;
    data.feature_names = feature_registry();
    std::set<std::string> seen;
    std::size_t unlabeled = 0;
    for (const auto& r : rows) {
      if (r.set.units() != args.units) continue;
      if (!seen.insert(r.id).second) throw Error(ErrorCode::Parse, "duplicate feature row for " + r.id);
      const auto it = label_of.find(r.id);
      if (it == label_of.end()) {
        ++unlabeled;
        continue;
      }
      LabeledRow row;
      row.id = r.id;
      row.group = r.id;
      row.label = it->second;
      row.features.resize(kFeatureCount);
      for (std::size_t k = 0; k < kFeatureCount; ++k)
        row.features[k] = r.set.valid(k) ? r.set.value(k) : std::numeric_limits<double>::quiet_NaN();
      data.rows.push_back(std::move(row));
    }
    if (unlabeled) log("warning: " + std::to_string(unlabeled) + " feature rows have no label and were skipped");
    if (data.size() == 0)
      throw Error(ErrorCode::InvalidArgument,
                  "no " + std::string(to_string(args.units)) + " feature rows match an id in the labels file");
    if (data.count(kHealthy) == 0 || data.count(kDisease) == 0)
      throw Error(ErrorCode::InvalidArgument, "classification needs both healthy and disease rows");

    const TrainTestSplit split = split_train_test(data, args.split, args.seed);
    // Twins are created after the split so no face contributes to both sides.
    const LabeledDataset train = augment_swap_lr(split.train);

    std::vector<TreeParams> grid;
    if (args.grid) {
      std::ifstream in(*args.grid);
      if (!in) throw Error(ErrorCode::Io, "cannot open " + args.grid->string());
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, args.grid->string() + ": " + e.what());
      }
      grid = grid_from_json(j, args.model);
    } else {
      grid = default_grid(args.model);
    }
    const GridResult search = grid_search(args.model, grid, train, args.folds, args.seed, args.threads);
    const Model model = train_model(args.model, train, search.best, args.seed, args.threads);

    const std::vector<double> scores = model.predict_proba(split.test);
    std::vector<int> truth, predicted;
    for (std::size_t i = 0; i < split.test.size(); ++i) {
      truth.push_back(split.test.rows[i].label);
      predicted.push_back(scores[i] >= 0.5 ? kDisease : kHealthy);
    }
    const ClassMetrics m = metrics(predicted, truth);
    double auc = std::numeric_limits<double>::quiet_NaN();
    try {
      auc = auroc(scores, truth);
    } catch (const Error& e) {
      log(std::string("warning: AUROC undefined: ") + e.what());
    }
    if (!m.precision_defined) log("warning: precision undefined (no disease predictions), reported as 0");
    if (!m.recall_defined) log("warning: recall undefined (no disease rows in the test split), reported as 0");

    io::ensure_directory(args.out_dir);
    {
      std::ofstream out = open_report(args.out_dir / "metrics.csv");
      out << "model,accuracy,precision,recall,auroc,n_train,n_test\n"
          << to_string(args.model) << ',' << format_double(m.accuracy) << ',' << format_double(m.precision) << ','
          << format_double(m.recall) << ',' << format_double(auc) << ',' << train.size() << ',' << split.test.size()
          << '\n';
    }
    write_text(args.out_dir / "model.json", model.to_json().dump(1) + "\n");
    {
      std::ofstream out = open_report(args.out_dir / "cv.csv");
      out << "grid_index,n_trees,max_depth,min_leaf,learning_rate,max_features";
      for (int f = 0; f < args.folds; ++f) out << ",fold_" << f + 1;
      out << ",mean_accuracy,selected\n";
      for (const auto& g : search.table) {
        out << g.index << ',' << g.params.n_trees << ',' << g.params.max_depth << ',' << g.params.min_leaf << ','
            << format_double(g.params.learning_rate) << ',' << g.params.max_features;
        for (double a : g.fold_accuracy) out << ',' << format_double(a);
        out << ',' << format_double(g.mean_accuracy) << ',' << (g.index == search.best_index ? 1 : 0) << '\n';
      }
    }
    {
      std::ofstream out = open_report(args.out_dir / "predictions.csv");
      out << "id,label,score,predicted\n";
      for (std::size_t i = 0; i < split.test.size(); ++i)
        out << csv::escape(split.test.rows[i].id) << ',' << truth[i] << ',' << format_double(scores[i]) << ','
            << predicted[i] << '\n';
    }
    std::ostringstream msg;
    msg << to_string(args.model) << ": accuracy " << format_double(m.accuracy) << ", precision "
        << format_double(m.precision) << ", recall " << format_double(m.recall) << ", AUROC " << format_double(auc)
        << " on " << split.test.size() << " held-out faces";
    log(msg.str());
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------

int cmd_synth(const SynthArgs& args, const Log& log) {
  return guarded(log, [&] {
    if (args.n < 1) throw Error(ErrorCode::InvalidArgument, "n must be at least 1");
    if (!(args.disease_fraction >= 0.0 && args.disease_fraction <= 1.0))
      throw Error(ErrorCode::InvalidArgument, "disease fraction must lie in [0, 1]");
    const auto n_disease = static_cast<std::size_t>(std::llround(static_cast<double>(args.n) * args.disease_fraction));
    const std::size_t n_healthy = args.n - n_disease;
    io::ensure_directory(args.out_dir);

    std::vector<SyntheticFace> faces;
    for (const auto& [count, ph] : {std::pair{n_healthy, Phenotype::Healthy}, std::pair{n_disease, Phenotype::Disease}}) {
      if (count == 0) continue;
      auto part = gen_population(count, ph, args.seed, args.threads);
      std::move(part.begin(), part.end(), std::back_inserter(faces));
    }

    std::vector<io::ManifestEntry> entries;
    std::vector<MeasurementRow> truth;
    std::vector<std::pair<std::string, int>> labels;
    for (const auto& f : faces) {
      const bool disease = f.phenotype == Phenotype::Disease;
      io::ManifestEntry e = io::save_face(args.out_dir, f.rendered.face, disease ? "disease" : "healthy");
      e.truth_csv = "truth.csv";
      entries.push_back(std::move(e));
      truth.push_back({f.rendered.face.id, f.rendered.truth_px});
      truth.push_back({f.rendered.face.id, f.rendered.truth_mm});
      labels.emplace_back(f.rendered.face.id, disease ? kDisease : kHealthy);
    }
    io::write_manifest(args.out_dir / "manifest.csv", entries);
    io::write_measurements(args.out_dir / "truth.csv", truth);
    io::write_labels(args.out_dir / "labels.csv", labels);
    log("wrote " + std::to_string(faces.size()) + " faces (" + std::to_string(n_healthy) + " healthy, " +
        std::to_string(n_disease) + " disease) to " + args.out_dir.string());
    return kExitOk;
  });
}

}  // namespace periorbital::batch
