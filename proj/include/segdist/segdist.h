/*
 * Copyright 2026 The segdist Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of libsegdist.
 *
 * Every fallible call returns a segdist_status. On failure the message of
 * the last error on the calling thread is available from
 * segdist_last_error() until the next failing call on that thread.
 * Strings returned through char** belong to the caller and are released
 * with segdist_string_free(); masks with segdist_mask_free().
 */

#ifndef SEGDIST_SEGDIST_H_
#define SEGDIST_SEGDIST_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SEGDIST_API __declspec(dllexport)
#else
#define SEGDIST_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum segdist_status {
  SEGDIST_OK = 0,
  SEGDIST_ERR_INVALID_ARGUMENT = 1,
  SEGDIST_ERR_DIMENSION = 2,
  SEGDIST_ERR_MALFORMED_MASK = 3,
  SEGDIST_ERR_UNDEFINED_RATIO = 4,
  SEGDIST_ERR_VALIDATION = 5,
  SEGDIST_ERR_IO = 6,
  SEGDIST_ERR_SCHEMA = 7,
  SEGDIST_ERR_INTERNAL = 8
} segdist_status;

typedef enum segdist_overlap {
  SEGDIST_IOU = 0,
  SEGDIST_IOP = 1, /* intersection over the first (predicted) mask */
  SEGDIST_IOG = 2  /* intersection over the second (ground-truth) mask */
} segdist_overlap;

typedef struct segdist_mask segdist_mask;

SEGDIST_API const char* segdist_version(void);
SEGDIST_API const char* segdist_last_error(void);
SEGDIST_API const char* segdist_status_string(segdist_status status);
/* 0 for success, 1 for validation failures (bad masks, dimensions,
 * undefined ratios, failed checks), 2 for I/O, schema and argument errors. */
SEGDIST_API int segdist_exit_code(segdist_status status);
SEGDIST_API void segdist_string_free(char* s);

/* ---- masks ---- */

/* Column-major COCO counts, starting with a run of zeros. */
SEGDIST_API segdist_status segdist_mask_from_counts(uint32_t height, uint32_t width,
                                                    const uint32_t* counts, size_t n,
                                                    segdist_mask** out);
/* Row-major bytes, non-zero means set. */
SEGDIST_API segdist_status segdist_mask_from_raster(uint32_t height, uint32_t width,
                                                    const uint8_t* pixels,
                                                    segdist_mask** out);
SEGDIST_API segdist_status segdist_mask_from_compressed(uint32_t height, uint32_t width,
                                                        const char* counts,
                                                        segdist_mask** out);
SEGDIST_API void segdist_mask_free(segdist_mask* mask);

SEGDIST_API segdist_status segdist_mask_dims(const segdist_mask* mask, uint32_t* height,
                                             uint32_t* width);
SEGDIST_API segdist_status segdist_mask_area(const segdist_mask* mask, uint64_t* area);
/* Writes up to `capacity` counts and stores the full length in *n; pass a
 * null buffer to query the length. */
SEGDIST_API segdist_status segdist_mask_counts(const segdist_mask* mask, uint32_t* buf,
                                               size_t capacity, size_t* n);
/* `buf` must hold height * width bytes (row-major). */
SEGDIST_API segdist_status segdist_mask_to_raster(const segdist_mask* mask, uint8_t* buf,
                                                  size_t capacity);
/* Compressed COCO string; free with segdist_string_free. */
SEGDIST_API segdist_status segdist_mask_to_compressed(const segdist_mask* mask,
                                                      char** out);

SEGDIST_API segdist_status segdist_mask_intersect(const segdist_mask* a,
                                                  const segdist_mask* b,
                                                  segdist_mask** out);
SEGDIST_API segdist_status segdist_mask_union(const segdist_mask* a, const segdist_mask* b,
                                              segdist_mask** out);
SEGDIST_API segdist_status segdist_mask_subtract(const segdist_mask* a,
                                                 const segdist_mask* b,
                                                 segdist_mask** out);
SEGDIST_API segdist_status segdist_mask_contains(const segdist_mask* outer,
                                                 const segdist_mask* inner, int* result);
SEGDIST_API segdist_status segdist_mask_ratio(const segdist_mask* pred,
                                              const segdist_mask* gt, segdist_overlap kind,
                                              double* result);

/* ---- random streams ---- */

/* First `n` outputs of the SplitMix64 stream keyed by (seed, index). */
SEGDIST_API segdist_status segdist_stream(uint64_t seed, uint64_t index, uint64_t* out,
                                          size_t n);
SEGDIST_API segdist_status segdist_probe_center(uint64_t seed, uint64_t index,
                                                uint32_t height, uint32_t width,
                                                uint32_t* row, uint32_t* col);

/* ---- file-level commands ----
 * `verbosity`: 0 silent, 1 warnings, 2 progress (all on stderr).
 * JSON results are returned through `json_out` when it is non-null. */

SEGDIST_API segdist_status segdist_confmask(const char* samples, double p,
                                            double score_floor, size_t max_outputs,
                                            const char* out, int verbosity);
SEGDIST_API segdist_status segdist_union_nms(const char* samples, double tau,
                                             int class_aware, const char* out,
                                             int verbosity);
SEGDIST_API segdist_status segdist_mode(const char* samples, const char* out,
                                        int verbosity);

/* `metrics`: comma-separated subset of "map,ar,ar-iog,mrhp", null for all.
 * Grids may be null to use 0.75:0.05:0.95. `report_prefix` may be null. */
SEGDIST_API segdist_status segdist_eval(const char* gt, const char* predictions,
                                        const char* metrics, const double* p_grid,
                                        size_t p_grid_len, const double* tau_grid,
                                        size_t tau_grid_len, const char* report_prefix,
                                        int svg, int verbosity, char** json_out);

/* One estimate per prediction file. `csv_out` and `svg_out` may be null.
 * The JSON is an object for one file and an array otherwise. */
SEGDIST_API segdist_status segdist_picksim(const char* gt, const char* const* predictions,
                                           size_t n_predictions, double radius,
                                           uint64_t probes, uint64_t seed,
                                           const char* csv_out, const char* svg_out,
                                           int verbosity, char** json_out);

/* `seed` may be null to use the seed stored in the spec. */
SEGDIST_API segdist_status segdist_synth(const char* spec, size_t k, const uint64_t* seed,
                                         size_t scenes, const char* out_dir,
                                         int verbosity);

SEGDIST_API segdist_status segdist_calibrate(const char* gt, const char* predictions,
                                             double iou_cut, double iop_cut,
                                             const char* report_prefix, int svg,
                                             int verbosity, char** json_out);

/* `passed` receives 1 when the check holds. */
SEGDIST_API segdist_status segdist_verify_guarantee(const char* spec, size_t k, double p,
                                                    size_t trials, const uint64_t* seed,
                                                    double slack, double score_floor,
                                                    int verbosity, char** json_out,
                                                    int* passed);

#ifdef __cplusplus
}
#endif

#endif /* SEGDIST_SEGDIST_H_ */
