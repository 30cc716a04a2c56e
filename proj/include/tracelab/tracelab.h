/* tracelab C API.
 *
 * Every call returns a tl_status. On failure a message is available from
 * tl_last_error() (per thread, valid until the next failing call on that thread).
 * Strings returned through char** are owned by the caller: release with tl_free_string.
 */
#ifndef TRACELAB_H
#define TRACELAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TL_API __declspec(dllexport)
#else
#define TL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tl_status {
    TL_OK = 0,
    TL_ERR_ARG = 1,
    TL_ERR_DOMAIN = 2,
    TL_ERR_IO = 3,
    TL_ERR_PARSE = 4,
    TL_ERR_NUMERIC = 5,
    TL_ERR_NOT_FOUND = 6,
    TL_ERR_INTERNAL = 7
} tl_status;

typedef enum tl_domain { TL_FULL = 0, TL_HALF = 1 } tl_domain;

typedef struct tl_grid tl_grid;     /* sampled function on a periodized grid */
typedef struct tl_lp tl_lp;         /* Littlewood-Paley system on a grid */
typedef struct tl_report tl_report; /* suite report */

TL_API const char* tl_last_error(void);
TL_API const char* tl_version(void);
TL_API const char* tl_status_name(tl_status s);
TL_API void tl_free_string(char* s);

/* Space calculus: `expr` uses the query grammar; *out_json = {"outcome":..,"citations":[..]}. */
TL_API tl_status tl_query(const char* expr, char** out_json);

/* Suites. config_json may be NULL (defaults); threads <= 0 uses TRACELAB_THREADS or all cores. */
TL_API tl_status tl_suite_list(char** out_json);
TL_API tl_status tl_suite_defaults(const char* name, char** out_json);
TL_API tl_status tl_suite_run(const char* name, const char* config_json, int threads, tl_report** out);
TL_API int tl_report_passed(const tl_report* r);
TL_API size_t tl_report_case_count(const tl_report* r);
/* format: "json" or "csv" */
TL_API tl_status tl_report_render(const tl_report* r, const char* format, char** out);
TL_API tl_status tl_report_write(const tl_report* r, const char* path, const char* format);
TL_API tl_status tl_report_read(const char* json_text, tl_report** out);
TL_API void tl_report_free(tl_report* r);

/* Deterministic bank written as <id>.wtlb files plus manifest.json.
 * n has d entries; blocks <= 0 selects the largest admissible count. */
TL_API tl_status tl_bank_write(uint64_t seed, int size, int d, const int* n, double L, int blocks,
                               const char* dir, int* out_count);

/* Grid functions. Values are interleaved (re, im), node-major, fiber components contiguous. */
TL_API tl_status tl_grid_create(int d, const int* n, double L, int offset, int r, double gamma, tl_grid** out);
TL_API tl_status tl_grid_load(const char* path, tl_grid** out);
TL_API tl_status tl_grid_save(const tl_grid* f, const char* path);
TL_API void tl_grid_free(tl_grid* f);
TL_API tl_status tl_grid_shape(const tl_grid* f, int* d, int* n, int n_cap, double* L, int* r);
TL_API size_t tl_grid_value_count(const tl_grid* f);
TL_API tl_status tl_grid_get(const tl_grid* f, double* values, size_t count);
TL_API tl_status tl_grid_set(tl_grid* f, const double* values, size_t count);
TL_API tl_status tl_grid_coord(const tl_grid* f, int axis, int i, double* x);
/* Declared support margin (fraction of the half-period); negative clears the declaration. */
TL_API tl_status tl_grid_set_support_margin(tl_grid* f, double margin);

/* LP system built on the grid of `like`. blocks <= 0 selects the largest admissible count. */
TL_API tl_status tl_lp_system_create(const tl_grid* like, double sharpness, int blocks, tl_lp** out);
TL_API int tl_lp_blocks(const tl_lp* sys);
TL_API void tl_lp_free(tl_lp* sys);
TL_API tl_status tl_lp_block(const tl_lp* sys, const tl_grid* f, int n, tl_grid** out);

/* Norms. family: "L" (s ignored), "W" (s = integer k), "H", "B", "F" (q required, sys required).
 * q may be INFINITY. */
TL_API tl_status tl_norm(const tl_grid* f, const char* family, double s, double p, double q, double gamma,
                         tl_domain dom, const tl_lp* sys, double* value, double* tail);

/* Same norm over several functions as CSV:
 * function_id,family,s_or_k,p,q,gamma,domain,value,tail */
TL_API tl_status tl_norm_batch_csv(const tl_grid* const* fs, const char* const* ids, size_t count,
                                   const char* family, double s, double p, double q, double gamma, tl_domain dom,
                                   const tl_lp* sys, char** out_csv);

/* Tr_m f on the boundary grid. sys must live on the grid of f. */
TL_API tl_status tl_trace(const tl_grid* f, const tl_lp* sys, int m, tl_grid** out);
/* ext_m g onto the full grid {n_normal, boundary axes}, same L; uses the blocks of bsys. */
TL_API tl_status tl_ext(const tl_grid* g, const tl_lp* bsys, int n_normal, int m, tl_grid** out);

#ifdef __cplusplus
}
#endif

#endif
