/*
 * Copyright 2026 The tri-lab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to libtrilab. Every object is an opaque handle released by its
 * own *_free function. Functions return a trilab_status; on failure the
 * message is available from trilab_last_error() on the calling thread until
 * the next failing call.
 */

#ifndef TRILAB_TRILAB_H_
#define TRILAB_TRILAB_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(TRILAB_BUILDING_LIBRARY)
#    define TRILAB_API __declspec(dllexport)
#  else
#    define TRILAB_API __declspec(dllimport)
#  endif
#else
#  define TRILAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum trilab_status {
  TRILAB_OK = 0,
  TRILAB_ERR_INVALID_ARGUMENT = 1,
  TRILAB_ERR_IO = 2,
  TRILAB_ERR_PARSE = 3,
  TRILAB_ERR_DIMENSION = 4,
  TRILAB_ERR_BREAKDOWN = 5,    /* non-positive IC pivot */
  TRILAB_ERR_LAYOUT = 6,       /* factor and layout disagree */
  TRILAB_ERR_CG_BREAKDOWN = 7, /* pᵀAp <= 0 */
  TRILAB_ERR_INTERNAL = 99
} trilab_status;

typedef enum trilab_ordering {
  TRILAB_ORDERING_NATURAL = 0,
  TRILAB_ORDERING_MC = 1,
  TRILAB_ORDERING_BMC = 2,
  TRILAB_ORDERING_HBMC = 3
} trilab_ordering;

typedef enum trilab_format { TRILAB_FORMAT_CRS = 0, TRILAB_FORMAT_SELL = 1 } trilab_format;

typedef struct trilab_matrix trilab_matrix;
typedef struct trilab_layout trilab_layout;
typedef struct trilab_report trilab_report;
typedef struct trilab_check_result trilab_check_result;

TRILAB_API const char* trilab_version(void);
TRILAB_API const char* trilab_last_error(void);
TRILAB_API const char* trilab_status_name(trilab_status status);
/* Doubles per vector register on this CPU (8, 4 or 2). */
TRILAB_API int32_t trilab_host_simd_width(void);
/* Logical cores, or TRILAB_THREADS when set. */
TRILAB_API int32_t trilab_default_threads(void);

TRILAB_API trilab_status trilab_parse_ordering(const char* name, trilab_ordering* out);
TRILAB_API trilab_status trilab_parse_format(const char* name, trilab_format* out);
TRILAB_API const char* trilab_ordering_name(trilab_ordering ordering);

/* ---- matrices ---- */

/* Reads a MatrixMarket file or a binary CSR cache (detected by magic).
 * With use_cache != 0, "<path>.csrbin" is read instead when it exists and is
 * not older than path, and written after a successful text parse. */
TRILAB_API trilab_status trilab_matrix_read(const char* path, int use_cache, trilab_matrix** out);
TRILAB_API trilab_status trilab_matrix_laplacian5pt(int32_t nx, int32_t ny, trilab_matrix** out);
TRILAB_API trilab_status trilab_matrix_random_spd(int32_t n, double density, uint64_t seed, trilab_matrix** out);
/* Builds from 0-based coordinate triplets (duplicates summed). */
TRILAB_API trilab_status trilab_matrix_from_triplets(int32_t n, size_t count, const int32_t* rows,
                                                     const int32_t* cols, const double* values,
                                                     trilab_matrix** out);
TRILAB_API trilab_status trilab_matrix_write_mtx(const trilab_matrix* m, const char* path);
TRILAB_API trilab_status trilab_matrix_write_cache(const trilab_matrix* m, const char* path);
TRILAB_API int32_t trilab_matrix_dim(const trilab_matrix* m);
TRILAB_API int64_t trilab_matrix_nnz(const trilab_matrix* m);
/* Ingestion counters; all zero for generated matrices and cache reads. */
TRILAB_API void trilab_matrix_ingest_stats(const trilab_matrix* m, size_t* dropped_zeros, size_t* merged_duplicates,
                                           int32_t* inserted_diagonals);
/* y = A x. */
TRILAB_API trilab_status trilab_matrix_spmv(const trilab_matrix* m, const double* x, double* y);
TRILAB_API void trilab_matrix_free(trilab_matrix* m);

/* ---- orderings ---- */

TRILAB_API trilab_status trilab_layout_build(const trilab_matrix* m, trilab_ordering ordering, int32_t block_size,
                                             int32_t width, trilab_layout** out);
TRILAB_API trilab_ordering trilab_layout_ordering(const trilab_layout* l);
TRILAB_API int32_t trilab_layout_n_colors(const trilab_layout* l);
/* BMC blocks (0 for natural/mc). */
TRILAB_API int32_t trilab_layout_n_blocks(const trilab_layout* l);
/* Dummy unknowns and whole dummy blocks added by HBMC (0 otherwise). */
TRILAB_API int32_t trilab_layout_n_dummies(const trilab_layout* l);
TRILAB_API int32_t trilab_layout_n_dummy_blocks(const trilab_layout* l);
/* Per color: nodes (mc), BMC blocks n(c) (bmc, hbmc) and level-1 blocks
 * (hbmc only, otherwise 0). */
TRILAB_API trilab_status trilab_layout_color_info(const trilab_layout* l, int32_t color, int32_t* members,
                                                  int32_t* level1_blocks);
/* ER condition of the secondary permutation (hbmc) or of the whole ordering
 * relative to natural order (other kinds). Returns 1 if it holds. */
TRILAB_API int trilab_layout_er_holds(const trilab_layout* l, size_t* violations);
TRILAB_API trilab_status trilab_layout_write(const trilab_layout* l, const char* path);
TRILAB_API void trilab_layout_free(trilab_layout* l);

/* ---- solver ---- */

typedef struct trilab_config {
  double tol;
  int32_t max_iters;
  trilab_ordering ordering;
  int32_t block_size;
  int32_t width;
  double shift;
  int32_t threads; /* 0: trilab_default_threads() */
  trilab_format format;
} trilab_config;

TRILAB_API void trilab_config_default(trilab_config* cfg);

/* Runs IC(0)-preconditioned CG. b may be NULL (then b = A·1); x may be NULL.
 * A non-converged run still returns TRILAB_OK; query the report. */
TRILAB_API trilab_status trilab_solve(const trilab_matrix* m, const double* b, const trilab_config* cfg, double* x,
                                      trilab_report** out);

TRILAB_API void trilab_report_set_matrix_name(trilab_report* r, const char* name);
TRILAB_API int32_t trilab_report_iterations(const trilab_report* r);
TRILAB_API int trilab_report_converged(const trilab_report* r);
TRILAB_API int32_t trilab_report_n_colors(const trilab_report* r);
TRILAB_API int32_t trilab_report_n_dummies(const trilab_report* r);
TRILAB_API int64_t trilab_report_barrier_total(const trilab_report* r);
TRILAB_API double trilab_report_setup_seconds(const trilab_report* r);
TRILAB_API double trilab_report_solve_seconds(const trilab_report* r);
TRILAB_API size_t trilab_report_history_length(const trilab_report* r);
TRILAB_API double trilab_report_history(const trilab_report* r, size_t j);
/* JSON text owned by the report, valid until the next call or free. */
TRILAB_API const char* trilab_report_json(trilab_report* r, int indent);
TRILAB_API void trilab_report_free(trilab_report* r);

/* ---- property checks ---- */

typedef struct trilab_check_options {
  const int32_t* block_sizes;
  size_t n_block_sizes;
  const int32_t* widths;
  size_t n_widths;
  const int32_t* threads; /* NULL: {1, 2, 4, 8} */
  size_t n_threads;
  double shift;
  uint64_t seed;
  int corrupt_permutation; /* test hook */
} trilab_check_options;

TRILAB_API void trilab_check_options_default(trilab_check_options* o);
TRILAB_API trilab_status trilab_check_run(const trilab_matrix* m, const trilab_check_options* o,
                                          trilab_check_result** out);
TRILAB_API int trilab_check_passed(const trilab_check_result* r);
TRILAB_API size_t trilab_check_count(const trilab_check_result* r);
/* Strings stay owned by the result. */
TRILAB_API trilab_status trilab_check_item(const trilab_check_result* r, size_t i, const char** property,
                                           int32_t* block_size, int32_t* width, int* passed, const char** detail);
TRILAB_API void trilab_check_free(trilab_check_result* r);

#ifdef __cplusplus
}
#endif

#endif /* TRILAB_TRILAB_H_ */
