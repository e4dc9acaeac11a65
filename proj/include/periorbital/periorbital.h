#ifndef PERIORBITAL_PERIORBITAL_H
#define PERIORBITAL_PERIORBITAL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(PERIORBITAL_BUILDING)
#define PO_API __declspec(dllexport)
#else
#define PO_API __declspec(dllimport)
#endif
#else
#define PO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum po_status {
  PO_OK = 0,
  PO_ERR_INVALID_ARGUMENT = 1,
  PO_ERR_DIMENSION_MISMATCH = 2,
  PO_ERR_EMPTY_MASK = 3,
  PO_ERR_DEGENERATE = 4,
  PO_ERR_OUT_OF_BOUNDS = 5,
  PO_ERR_IO = 6,
  PO_ERR_PARSE = 7,
  PO_ERR_INTERNAL = 8
} po_status;

/* Message for the last failing call on this thread; "" when none. */
PO_API const char* po_last_error(void);
PO_API const char* po_version(void);

typedef enum po_side { PO_RIGHT = 0, PO_LEFT = 1 } po_side;
typedef enum po_class { PO_SCLERA = 0, PO_IRIS = 1, PO_BROW = 2 } po_class;
typedef enum po_units { PO_PX = 0, PO_MM = 1 } po_units;

/* Feature registry: right_* (16), left_* (16), icd, ipd, ocd, vertical_dystopia. */
PO_API size_t po_feature_count(void);
/* NULL when out of range. */
PO_API const char* po_feature_name(size_t index);
/* -1 when unknown. */
PO_API int po_feature_index(const char* name);

/* ---- masks ---- */

typedef struct po_mask po_mask;

PO_API po_status po_mask_create(int width, int height, po_mask** out);
PO_API void po_mask_destroy(po_mask* mask);
PO_API po_status po_mask_set(po_mask* mask, int x, int y, int on);
/* Out-of-bounds reads are 0. */
PO_API int po_mask_get(const po_mask* mask, int x, int y);
PO_API po_status po_mask_size(const po_mask* mask, int* width, int* height);
PO_API size_t po_mask_count(const po_mask* mask);
PO_API po_status po_mask_load_pgm(const char* path, po_mask** out);
PO_API po_status po_mask_save_pgm(const po_mask* mask, const char* path);
/* 2|X∩Y| / (|X|+|Y|); two empty masks score 1. */
PO_API po_status po_dice(const po_mask* x, const po_mask* y, double* out);

/* ---- faces and measurement ---- */

typedef struct po_face po_face;
typedef struct po_measurements po_measurements;

/* All six masks start empty at width x height. */
PO_API po_status po_face_create(int width, int height, const char* id, po_face** out);
PO_API void po_face_destroy(po_face* face);
/* Copies the mask, which must match the face size. */
PO_API po_status po_face_set_mask(po_face* face, po_side side, po_class cls, const po_mask* mask);
PO_API po_status po_face_get_mask(const po_face* face, po_side side, po_class cls, po_mask** out);
PO_API po_status po_face_set_landmarks(po_face* face, double nasion_x, double nasion_y, double hairline_x,
                                       double hairline_y);
/* Rotates the whole face by `degrees` about the nasion. */
PO_API po_status po_face_rotate(const po_face* face, double degrees, po_face** out);

/* normalize != 0 rotates the face upright along the nasion-hairline axis first. */
PO_API po_status po_face_measure(const po_face* face, int normalize, po_measurements** out);
PO_API void po_measurements_destroy(po_measurements* m);
/* *valid is 0 and *value NaN when the feature could not be measured. */
PO_API po_status po_measurements_value(const po_measurements* m, po_units units, size_t index, double* value,
                                       int* valid);
PO_API uint64_t po_measurements_valid_bitmask(const po_measurements* m, po_units units);
/* Millimeters per pixel for one eye; PO_ERR_EMPTY_MASK without an iris. */
PO_API po_status po_measurements_scale(const po_measurements* m, po_side side, double* mm_per_px);

/* Synthetic face number `index` of the seeded population, with its analytic
   truth. Either output may be NULL. */
PO_API po_status po_synth_face(uint64_t seed, size_t index, int disease, po_face** face, po_measurements** truth);

/* ---- statistics ---- */

PO_API po_status po_mae(const double* predicted, const double* truth, size_t n, double* mean, double* sd);

typedef struct po_agreement {
  double mean_diff;
  double sd_diff;
  double loa_low;
  double loa_high;
  double pct_outside;
  size_t n;
} po_agreement;

PO_API po_status po_bland_altman(const double* predicted, const double* truth, size_t n, po_agreement* out);

/* Labels are 0 (healthy) or 1 (disease). */
PO_API po_status po_auroc(const double* scores, const int* labels, size_t n, double* out);

typedef struct po_metrics {
  double accuracy;
  double precision;
  double recall;
  int precision_defined;
  int recall_defined;
  size_t tp, tn, fp, fn;
} po_metrics;

PO_API po_status po_classification_metrics(const int* predictions, const int* labels, size_t n, po_metrics* out);

/* ---- trained models ---- */

typedef struct po_model po_model;

PO_API po_status po_model_load(const char* path, po_model** out);
PO_API void po_model_destroy(po_model* model);
/* Disease probability for one row of registry-ordered features; NaN = missing. */
PO_API po_status po_model_predict_proba(const po_model* model, const double* features, size_t n_features,
                                        double* out);

/* ---- batch commands ----
   Each returns the process exit code: 0 clean, 2 partial, 1 failure.
   `log` receives one line per call and may be NULL. Unset optional paths are NULL. */

typedef void (*po_log_fn)(const char* line, void* user);

typedef enum po_unit_selection { PO_UNITS_PX = 0, PO_UNITS_MM = 1, PO_UNITS_BOTH = 2 } po_unit_selection;

typedef struct po_measure_args {
  const char* manifest;
  const char* out_csv;
  po_unit_selection units;
  int normalize;
  unsigned threads; /* 0 = default */
} po_measure_args;

typedef struct po_dice_args {
  const char* pred_manifest;
  const char* truth_manifest;
  const char* out_csv;
  unsigned threads;
} po_dice_args;

typedef struct po_evaluate_args {
  const char* pred_csv;
  const char* truth_csv;
  const char* out_dir;
  int bilateral_average;
  int filter_brow_outliers;
  const char* exclude_ids;
  const char* baseline_csv;
} po_evaluate_args;

typedef enum po_model_family { PO_MODEL_RF = 0, PO_MODEL_GBT = 1 } po_model_family;

typedef struct po_classify_args {
  const char* features_csv;
  const char* labels_csv;
  const char* out_dir;
  po_model_family model;
  const char* grid;
  uint64_t seed;
  double split;
  int folds;
  po_units units;
  unsigned threads;
} po_classify_args;

typedef struct po_synth_args {
  size_t n;
  double disease_fraction;
  uint64_t seed;
  const char* out_dir;
  unsigned threads;
} po_synth_args;

/* Fill in the defaults; paths stay NULL. */
PO_API void po_measure_args_init(po_measure_args* a);
PO_API void po_dice_args_init(po_dice_args* a);
PO_API void po_evaluate_args_init(po_evaluate_args* a);
PO_API void po_classify_args_init(po_classify_args* a);
PO_API void po_synth_args_init(po_synth_args* a);

PO_API int po_run_measure(const po_measure_args* args, po_log_fn log, void* user);
PO_API int po_run_dice(const po_dice_args* args, po_log_fn log, void* user);
PO_API int po_run_evaluate(const po_evaluate_args* args, po_log_fn log, void* user);
PO_API int po_run_classify(const po_classify_args* args, po_log_fn log, void* user);
PO_API int po_run_synth(const po_synth_args* args, po_log_fn log, void* user);

#ifdef __cplusplus
}
#endif

#endif
