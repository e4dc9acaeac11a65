#include "periorbital/periorbital.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <span>
#include <string>

#include "anthro.hpp"
#include "batch.hpp"
#include "classify.hpp"
#include "io.hpp"
#include "maskgeom.hpp"
#include "prep.hpp"
#include "stats.hpp"
#include "synth.hpp"

namespace po = periorbital;

struct po_mask {
  po::RasterMask mask;
};

struct po_face {
  po::FaceRecord face;
};

struct po_measurements {
  po::FaceMeasurement m;
};

struct po_model {
  po::Model model;
};

namespace {

thread_local std::string g_last_error;

po_status status_of(po::ErrorCode c) {
  switch (c) {
    case po::ErrorCode::InvalidArgument: return PO_ERR_INVALID_ARGUMENT;
    case po::ErrorCode::DimensionMismatch: return PO_ERR_DIMENSION_MISMATCH;
    case po::ErrorCode::EmptyMask: return PO_ERR_EMPTY_MASK;
    case po::ErrorCode::Degenerate: return PO_ERR_DEGENERATE;
    case po::ErrorCode::OutOfBounds: return PO_ERR_OUT_OF_BOUNDS;
    case po::ErrorCode::Io: return PO_ERR_IO;
    case po::ErrorCode::Parse: return PO_ERR_PARSE;
  }
  return PO_ERR_INTERNAL;
}

po_status fail(po_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
po_status call(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return PO_OK;
  } catch (const po::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PO_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PO_ERR_INTERNAL, e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw po::Error(po::ErrorCode::InvalidArgument, what);
}

po::EyeSide side_of(po_side s) {
  require(s == PO_RIGHT || s == PO_LEFT, "side must be PO_RIGHT or PO_LEFT");
  return s == PO_RIGHT ? po::EyeSide::Right : po::EyeSide::Left;
}

po::RasterMask& mask_slot(po::FaceRecord& f, po_side s, po_class c) {
  po::EyeRecord& eye = f.eye(side_of(s));
  switch (c) {
    case PO_SCLERA: return eye.sclera;
    case PO_IRIS: return eye.iris;
    case PO_BROW: return eye.brow;
  }
  throw po::Error(po::ErrorCode::InvalidArgument, "class must be PO_SCLERA, PO_IRIS or PO_BROW");
}

po::MaskClass mask_class(po_class c) {
  return c == PO_IRIS ? po::MaskClass::Iris : c == PO_BROW ? po::MaskClass::Brow : po::MaskClass::Sclera;
}

po::PairedSeries series(const double* pred, const double* truth, size_t n) {
  require(n == 0 || (pred && truth), "null series");
  po::PairedSeries s;
  for (size_t i = 0; i < n; ++i) s.push(std::to_string(i), pred[i], truth[i]);
  return s;
}

std::vector<int> int_vector(const int* p, size_t n) {
  require(n == 0 || p, "null array");
  return std::vector<int>(p, p + n);
}

po::batch::Log make_log(po_log_fn fn, void* user) {
  return [fn, user](const std::string& line) {
    if (fn) fn(line.c_str(), user);
  };
}

std::optional<std::filesystem::path> opt_path(const char* p) {
  if (!p) return std::nullopt;
  return std::filesystem::path(p);
}

// Batch entry points report argument problems through the log, like any other failure.
template <class Fn>
int run(po_log_fn fn, void* user, Fn&& body) {
  const auto log = make_log(fn, user);
  try {
    return body(log);
  } catch (const std::exception& e) {
    log(std::string("error: ") + e.what());
    return po::batch::kExitFailure;
  }
}

}  // namespace

extern "C" {

const char* po_last_error(void) { return g_last_error.c_str(); }
const char* po_version(void) { return "1.0.0"; }

size_t po_feature_count(void) { return po::kFeatureCount; }

const char* po_feature_name(size_t index) {
  const auto& reg = po::feature_registry();
  return index < reg.size() ? reg[index].c_str() : nullptr;
}

int po_feature_index(const char* name) {
  if (!name) return -1;
  const auto i = po::find_feature(name);
  return i ? static_cast<int>(*i) : -1;
}

// ---- masks

po_status po_mask_create(int width, int height, po_mask** out) {
  return call([&] {
    require(out, "null output");
    *out = nullptr;
    require(width > 0 && height > 0, "mask dimensions must be positive");
    *out = new po_mask{po::RasterMask(width, height)};
  });
}

void po_mask_destroy(po_mask* mask) { delete mask; }

po_status po_mask_set(po_mask* mask, int x, int y, int on) {
  return call([&] {
    require(mask, "null mask");
    if (!mask->mask.in_bounds(x, y)) throw po::Error(po::ErrorCode::OutOfBounds, "pixel outside the mask");
    mask->mask.set(x, y, on != 0);
  });
}

int po_mask_get(const po_mask* mask, int x, int y) { return mask && mask->mask.test(x, y) ? 1 : 0; }

po_status po_mask_size(const po_mask* mask, int* width, int* height) {
  return call([&] {
    require(mask, "null mask");
    if (width) *width = mask->mask.width();
    if (height) *height = mask->mask.height();
  });
}

size_t po_mask_count(const po_mask* mask) { return mask ? mask->mask.count() : 0; }

po_status po_mask_load_pgm(const char* path, po_mask** out) {
  return call([&] {
    require(path && out, "null argument");
    *out = nullptr;
    *out = new po_mask{po::io::read_pgm(path)};
  });
}

po_status po_mask_save_pgm(const po_mask* mask, const char* path) {
  return call([&] {
    require(mask && path, "null argument");
    po::io::write_pgm(path, mask->mask);
  });
}

po_status po_dice(const po_mask* x, const po_mask* y, double* out) {
  return call([&] {
    require(x && y && out, "null argument");
    *out = po::dice(x->mask, y->mask);
  });
}

// ---- faces

po_status po_face_create(int width, int height, const char* id, po_face** out) {
  return call([&] {
    require(out, "null output");
    *out = nullptr;
    require(width > 0 && height > 0, "face dimensions must be positive");
    auto f = std::make_unique<po_face>();
    f->face.width = width;
    f->face.height = height;
    f->face.id = id ? id : "";
    for (po::EyeSide s : {po::EyeSide::Right, po::EyeSide::Left}) {
      po::EyeRecord& eye = f->face.eye(s);
      eye.side = s;
      eye.id = f->face.id;
      eye.sclera = po::RasterMask(width, height, po::MaskClass::Sclera);
      eye.iris = po::RasterMask(width, height, po::MaskClass::Iris);
      eye.brow = po::RasterMask(width, height, po::MaskClass::Brow);
    }
    *out = f.release();
  });
}

void po_face_destroy(po_face* face) { delete face; }

po_status po_face_set_mask(po_face* face, po_side side, po_class cls, const po_mask* mask) {
  return call([&] {
    require(face && mask, "null argument");
    po::RasterMask& slot = mask_slot(face->face, side, cls);
    if (mask->mask.width() != face->face.width || mask->mask.height() != face->face.height)
      throw po::Error(po::ErrorCode::DimensionMismatch, "mask size differs from the face size");
    slot = mask->mask;
    slot.set_class_label(mask_class(cls));
  });
}

po_status po_face_get_mask(const po_face* face, po_side side, po_class cls, po_mask** out) {
  return call([&] {
    require(face && out, "null argument");
    *out = nullptr;
    *out = new po_mask{mask_slot(const_cast<po::FaceRecord&>(face->face), side, cls)};
  });
}

po_status po_face_set_landmarks(po_face* face, double nasion_x, double nasion_y, double hairline_x,
                                double hairline_y) {
  return call([&] {
    require(face, "null face");
    require(std::isfinite(nasion_x) && std::isfinite(nasion_y) && std::isfinite(hairline_x) &&
                std::isfinite(hairline_y),
            "landmarks must be finite");
    face->face.landmarks = {{nasion_x, nasion_y}, {hairline_x, hairline_y}};
  });
}

po_status po_face_rotate(const po_face* face, double degrees, po_face** out) {
  return call([&] {
    require(face && out, "null argument");
    *out = nullptr;
    require(std::isfinite(degrees), "angle must be finite");
    const po::RigidTransform tf{degrees, face->face.landmarks.nasion, {0.0, 0.0}};
    *out = new po_face{po::transform_face(face->face, tf)};
  });
}

po_status po_face_measure(const po_face* face, int normalize, po_measurements** out) {
  return call([&] {
    require(face && out, "null argument");
    *out = nullptr;
    const po::FaceRecord f = normalize ? po::normalize_orientation(face->face).first : face->face;
    *out = new po_measurements{po::measure_face(f)};
  });
}

void po_measurements_destroy(po_measurements* m) { delete m; }

po_status po_measurements_value(const po_measurements* m, po_units units, size_t index, double* value, int* valid) {
  return call([&] {
    require(m && value, "null argument");
    require(units == PO_PX || units == PO_MM, "units must be PO_PX or PO_MM");
    if (index >= po::kFeatureCount) throw po::Error(po::ErrorCode::OutOfBounds, "feature index out of range");
    const po::MeasurementSet& s = units == PO_PX ? m->m.px : m->m.mm;
    const auto v = s.get(index);
    *value = v ? *v : std::numeric_limits<double>::quiet_NaN();
    if (valid) *valid = v ? 1 : 0;
  });
}

uint64_t po_measurements_valid_bitmask(const po_measurements* m, po_units units) {
  if (!m) return 0;
  return (units == PO_MM ? m->m.mm : m->m.px).valid_bitmask();
}

po_status po_measurements_scale(const po_measurements* m, po_side side, double* mm_per_px) {
  return call([&] {
    require(m && mm_per_px, "null argument");
    const auto& s = side_of(side) == po::EyeSide::Right ? m->m.right_scale : m->m.left_scale;
    if (!s) throw po::Error(po::ErrorCode::EmptyMask, "no iris scale for this eye");
    *mm_per_px = s->mm_per_px;
  });
}

po_status po_synth_face(uint64_t seed, size_t index, int disease, po_face** face, po_measurements** truth) {
  return call([&] {
    if (face) *face = nullptr;
    if (truth) *truth = nullptr;
    const auto params =
        po::sample_face_params(disease ? po::Phenotype::Disease : po::Phenotype::Healthy, seed, index);
    po::RenderedFace r = po::render_face(params);
    std::unique_ptr<po_measurements> t;
    if (truth) {
      t = std::make_unique<po_measurements>();
      t->m.px = r.truth_px;
      t->m.mm = r.truth_mm;
    }
    if (face) *face = new po_face{std::move(r.face)};
    if (truth) *truth = t.release();
  });
}

// ---- statistics

po_status po_mae(const double* predicted, const double* truth, size_t n, double* mean, double* sd) {
  return call([&] {
    require(mean, "null output");
    const po::MaeSummary s = po::mae(series(predicted, truth, n));
    *mean = s.mean;
    if (sd) *sd = s.sd;
  });
}

po_status po_bland_altman(const double* predicted, const double* truth, size_t n, po_agreement* out) {
  return call([&] {
    require(out, "null output");
    const po::AgreementReport r = po::bland_altman(series(predicted, truth, n));
    *out = {r.mean_diff, r.sd_diff, r.loa_low, r.loa_high, r.pct_outside, r.n};
  });
}

po_status po_auroc(const double* scores, const int* labels, size_t n, double* out) {
  return call([&] {
    require(out && (n == 0 || scores), "null argument");
    *out = po::auroc(std::vector<double>(scores, scores + n), int_vector(labels, n));
  });
}

po_status po_classification_metrics(const int* predictions, const int* labels, size_t n, po_metrics* out) {
  return call([&] {
    require(out, "null output");
    const po::ClassMetrics m = po::metrics(int_vector(predictions, n), int_vector(labels, n));
    *out = {m.accuracy, m.precision, m.recall, m.precision_defined, m.recall_defined, m.tp, m.tn, m.fp, m.fn};
  });
}

// ---- models

po_status po_model_load(const char* path, po_model** out) {
  return call([&] {
    require(path && out, "null argument");
    *out = nullptr;
    std::ifstream in(path);
    if (!in) throw po::Error(po::ErrorCode::Io, std::string("cannot open ") + path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw po::Error(po::ErrorCode::Parse, std::string(path) + ": " + e.what());
    }
    *out = new po_model{po::Model::from_json(j)};
  });
}

void po_model_destroy(po_model* model) { delete model; }

po_status po_model_predict_proba(const po_model* model, const double* features, size_t n_features, double* out) {
  return call([&] {
    require(model && features && out, "null argument");
    if (n_features != po::kFeatureCount)
      throw po::Error(po::ErrorCode::DimensionMismatch, "expected " + std::to_string(po::kFeatureCount) + " features");
    *out = model->model.predict_proba(std::span<const double>(features, n_features));
  });
}

// ---- batch commands

void po_measure_args_init(po_measure_args* a) {
  if (a) *a = {nullptr, nullptr, PO_UNITS_BOTH, 1, 0};
}
void po_dice_args_init(po_dice_args* a) {
  if (a) *a = {nullptr, nullptr, nullptr, 0};
}
void po_evaluate_args_init(po_evaluate_args* a) {
  if (a) *a = {nullptr, nullptr, nullptr, 0, 0, nullptr, nullptr};
}
void po_classify_args_init(po_classify_args* a) {
  if (a) *a = {nullptr, nullptr, nullptr, PO_MODEL_RF, nullptr, 0, 0.8, 5, PO_MM, 0};
}
void po_synth_args_init(po_synth_args* a) {
  if (a) *a = {0, 0.5, 0, nullptr, 0};
}

int po_run_measure(const po_measure_args* a, po_log_fn fn, void* user) {
  return run(fn, user, [&](const po::batch::Log& log) {
    require(a && a->manifest && a->out_csv, "measure needs a manifest and an output path");
    po::batch::MeasureArgs m;
    m.manifest = a->manifest;
    m.out_csv = a->out_csv;
    m.units = a->units == PO_UNITS_PX   ? po::batch::UnitSelection::Px
              : a->units == PO_UNITS_MM ? po::batch::UnitSelection::Mm
                                        : po::batch::UnitSelection::Both;
    m.normalize = a->normalize != 0;
    m.threads = a->threads;
    return po::batch::cmd_measure(m, log);
  });
}

int po_run_dice(const po_dice_args* a, po_log_fn fn, void* user) {
  return run(fn, user, [&](const po::batch::Log& log) {
    require(a && a->pred_manifest && a->truth_manifest && a->out_csv, "dice needs two manifests and an output path");
    po::batch::DiceArgs d;
    d.pred_manifest = a->pred_manifest;
    d.truth_manifest = a->truth_manifest;
    d.out_csv = a->out_csv;
    d.threads = a->threads;
    return po::batch::cmd_dice(d, log);
  });
}

int po_run_evaluate(const po_evaluate_args* a, po_log_fn fn, void* user) {
  return run(fn, user, [&](const po::batch::Log& log) {
    require(a && a->pred_csv && a->truth_csv && a->out_dir, "evaluate needs two CSVs and an output directory");
    po::batch::EvaluateArgs e;
    e.pred_csv = a->pred_csv;
    e.truth_csv = a->truth_csv;
    e.out_dir = a->out_dir;
    e.bilateral_average = a->bilateral_average != 0;
    e.filter_brow_outliers = a->filter_brow_outliers != 0;
    e.exclude_ids = opt_path(a->exclude_ids);
    e.baseline_csv = opt_path(a->baseline_csv);
    return po::batch::cmd_evaluate(e, log);
  });
}

int po_run_classify(const po_classify_args* a, po_log_fn fn, void* user) {
  return run(fn, user, [&](const po::batch::Log& log) {
    require(a && a->features_csv && a->labels_csv && a->out_dir, "classify needs features, labels and an output directory");
    require(a->model == PO_MODEL_RF || a->model == PO_MODEL_GBT, "unknown model family");
    require(a->split > 0.0 && a->split < 1.0, "split must lie strictly between 0 and 1");
    require(a->folds >= 2, "folds must be at least 2");
    po::batch::ClassifyArgs c;
    c.features_csv = a->features_csv;
    c.labels_csv = a->labels_csv;
    c.out_dir = a->out_dir;
    c.model = a->model == PO_MODEL_GBT ? po::ModelFamily::GradientBoosting : po::ModelFamily::RandomForest;
    c.grid = opt_path(a->grid);
    c.seed = a->seed;
    c.split = a->split;
    c.folds = a->folds;
    c.units = a->units == PO_PX ? po::Units::Px : po::Units::Mm;
    c.threads = a->threads;
    return po::batch::cmd_classify(c, log);
  });
}

int po_run_synth(const po_synth_args* a, po_log_fn fn, void* user) {
  return run(fn, user, [&](const po::batch::Log& log) {
    require(a && a->out_dir, "synth needs an output directory");
    po::batch::SynthArgs s;
    s.n = a->n;
    s.disease_fraction = a->disease_fraction;
    s.seed = a->seed;
    s.out_dir = a->out_dir;
    s.threads = a->threads;
    return po::batch::cmd_synth(s, log);
  });
}

}  // extern "C"
