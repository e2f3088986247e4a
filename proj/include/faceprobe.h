/* faceprobe — facial attribute analysis (gender / age range / expression /
 * ethnicity) behind a C shared-library interface.
 *
 * All functions return fp_status; on failure, *err (when non-NULL) receives
 * a message allocated with malloc — release it with fp_free. Returned
 * strings follow the same rule.
 */
#ifndef FACEPROBE_H
#define FACEPROBE_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fp_status {
  FP_OK = 0,
  FP_ERR_USAGE = 1,   /* bad arguments or configuration */
  FP_ERR_DATA = 2,    /* missing/malformed files, labels or models */
  FP_ERR_NUMERIC = 3  /* numerical failure (divergence, degenerate geometry) */
} fp_status;

/* Opaque trained-model bundle (one or more task heads in a .fprb file). */
typedef struct fp_bundle fp_bundle;

typedef struct fp_train_options {
  const char* preset;   /* named preset or NULL */
  int hidden;           /* hidden units; <= 0 keeps the preset/default */
  long iterations;      /* <= 0 keeps the preset/default */
  double learning_rate; /* <= 0 -> 0.01 */
  double goal_mse;      /* <= 0 -> 0.0001 */
  uint64_t seed;
  double pca;           /* 0: all components; (0,1): variance fraction; >= 1: count */
  int texture_size;     /* AAM texture frame; <= 0 keeps the preset/default */
  int grid_step;        /* Gabor sampling grid; <= 0 -> 4 */
  double variance_keep; /* AAM PCA retention; <= 0 -> 0.98 */
} fp_train_options;

const char* fp_version(void);
void fp_free(char* ptr);

/* Writes a synthetic labeled corpus under out_dir (train.csv / test.csv,
 * images/, landmarks/). spec_path NULL uses the built-in default spec. */
fp_status fp_synth(const char* spec_path, const char* out_dir, uint64_t seed, char** err);

/* Trains one task head ("gender", "age", "expression", "ethnicity") or the
 * gender-routed pair plus gender head ("age-cascade"); extractor is one of
 * "aam", "gabor", "lbp", "wd". If out_bundle already exists the new heads
 * are merged into it, otherwise a fresh bundle is written. */
fp_status fp_train(const char* manifest_path, const char* task, const char* extractor,
                   const fp_train_options* options, const char* out_bundle, char** err);

fp_status fp_bundle_open(const char* path, fp_bundle** out, char** err);
void fp_bundle_close(fp_bundle* bundle);

/* Single-image report over all four attributes. eyes4 is {lx, ly, rx, ry}
 * or NULL; landmarks_path may be NULL when no AAM head is involved.
 * as_json selects the JSON schema over the human-readable text. */
fp_status fp_predict(const fp_bundle* bundle, const char* image_path, const double* eyes4,
                     const char* landmarks_path, int as_json, char** report, char** err);

/* Evaluates bundle heads against a labeled manifest. task narrows to one
 * head token or "age-cascade"; NULL evaluates everything present. The CSV
 * report is written to report_csv_path when non-NULL; *summary receives the
 * text summary. */
fp_status fp_evaluate(const fp_bundle* bundle, const char* manifest_path, const char* task,
                      const char* report_csv_path, char** summary, char** err);

/* Timing table for predicting 1 / 10 / all manifest images. */
fp_status fp_benchmark(const fp_bundle* bundle, const char* manifest_path, char** table,
                       char** err);

/* Renders the mode_index-th appearance mode at -3..+3 sqrt(lambda) into
 * PNG files under out_dir (requires an AAM head). */
fp_status fp_inspect_aam(const fp_bundle* bundle, int mode_index, const char* out_dir, char** err);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FACEPROBE_H */
