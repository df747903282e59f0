/* C interface for the mgal multi-graph learning engine. */

#ifndef MGAL_H
#define MGAL_H

/* Generated by cbindgen from the mgal-capi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Call outcome. Anything but `Ok` leaves a message in `mgal_last_error`.
 */
typedef enum MgalStatus {
  MGAL_STATUS_OK = 0,
  MGAL_STATUS_NULL_POINTER = 1,
  MGAL_STATUS_INVALID_UTF8 = 2,
  MGAL_STATUS_INVALID_ARGUMENT = 3,
  MGAL_STATUS_IO_ERROR = 4,
  MGAL_STATUS_NUMERIC_ERROR = 5,
  MGAL_STATUS_PANIC = 6,
} MgalStatus;

/**
 * Opaque multi-graph dataset handle.
 */
typedef struct MgalDataset MgalDataset;

/**
 * Opaque experiment result handle.
 */
typedef struct MgalResult MgalResult;

/**
 * Experiment settings for [`mgal_run`]. Obtain defaults from
 * [`mgal_run_options_default`] and override fields as needed.
 */
typedef struct MgalRunOptions {
  /**
   * One of: gcn_single, gcn_m, multi_gcn, mgl, mgal. Null means mgal.
   */
  const char *method;
  /**
   * View index used by gcn_single.
   */
  size_t view;
  /**
   * Labeled fraction per class, in (0, 1).
   */
  double label_ratio;
  /**
   * Fraction of nodes held out for early stopping.
   */
  double validation_fraction;
  /**
   * Number of runs with reseeded splits.
   */
  size_t runs;
  /**
   * Base seed; run r uses base_seed + r.
   */
  uint64_t base_seed;
  /**
   * Weight of the adversarial term in the generator objective.
   */
  double lambda;
  /**
   * Prediction head: fc or gconv. Null means fc.
   */
  const char *head;
} MgalRunOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *mgal_version(void);

/**
 * Message for the most recent failure on this thread, or null if none.
 * Valid until the next failing call on the same thread.
 */
const char *mgal_last_error(void);

/**
 * Samples a named synthetic preset ("default" or "small") into a new
 * dataset handle.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MgalStatus mgal_dataset_synth(const char *name, struct MgalDataset **out);

/**
 * Loads a dataset from a manifest file (see the data format documentation).
 *
 * # Safety
 * `manifest_path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MgalStatus mgal_dataset_load(const char *manifest_path, struct MgalDataset **out);

/**
 * # Safety
 * `dataset` must be a live handle from this library or null.
 */
void mgal_dataset_free(struct MgalDataset *dataset);

/**
 * Returns 0 when the handle is null.
 *
 * # Safety
 * `dataset` must be a live handle from this library or null.
 */
size_t mgal_dataset_num_nodes(const struct MgalDataset *dataset);

/**
 * Returns 0 when the handle is null.
 *
 * # Safety
 * `dataset` must be a live handle from this library or null.
 */
size_t mgal_dataset_num_views(const struct MgalDataset *dataset);

/**
 * Returns 0 when the handle is null.
 *
 * # Safety
 * `dataset` must be a live handle from this library or null.
 */
size_t mgal_dataset_feature_dim(const struct MgalDataset *dataset);

/**
 * Returns 0 when the handle is null.
 *
 * # Safety
 * `dataset` must be a live handle from this library or null.
 */
size_t mgal_dataset_num_classes(const struct MgalDataset *dataset);

/**
 * Default run options: method mgal, ratio 0.1, 5% validation, 5 runs,
 * seed 0, lambda 1, fc head.
 */
struct MgalRunOptions mgal_run_options_default(void);

/**
 * Runs one experiment on the dataset and returns an aggregate result handle.
 *
 * # Safety
 * `dataset` must be a live handle, `options` and `out` valid pointers, and
 * any strings inside `options` NUL-terminated.
 */
enum MgalStatus mgal_run(const struct MgalDataset *dataset,
                         const struct MgalRunOptions *options,
                         struct MgalResult **out);

/**
 * # Safety
 * `result` must be a live handle from this library or null.
 */
void mgal_result_free(struct MgalResult *result);

/**
 * Mean test accuracy over the runs; NaN for a null handle.
 *
 * # Safety
 * `result` must be a live handle from this library or null.
 */
double mgal_result_mean(const struct MgalResult *result);

/**
 * Population standard deviation over the runs; NaN for a null handle.
 *
 * # Safety
 * `result` must be a live handle from this library or null.
 */
double mgal_result_std(const struct MgalResult *result);

/**
 * Number of runs aggregated in the result; 0 for a null handle.
 *
 * # Safety
 * `result` must be a live handle from this library or null.
 */
size_t mgal_result_num_runs(const struct MgalResult *result);

/**
 * Fetches the test accuracy of one run.
 *
 * # Safety
 * `result` must be a live handle and `accuracy` a valid pointer.
 */
enum MgalStatus mgal_result_accuracy(const struct MgalResult *result, size_t run, double *accuracy);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* MGAL_H */
