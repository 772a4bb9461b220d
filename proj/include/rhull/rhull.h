#ifndef RHULL_RHULL_H
#define RHULL_RHULL_H

/*
 * C interface to the r-convex support estimation library.
 *
 * Handles are opaque. Every fallible call returns an rhull_status; on failure
 * rhull_last_error() holds a message for the calling thread. Strings returned
 * through char** outputs are owned by the caller and released with
 * rhull_string_free. JSON outputs encode non-finite numbers as null.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RHULL_API __declspec(dllexport)
#else
#define RHULL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rhull_status {
    RHULL_OK = 0,
    RHULL_INVALID_ARGUMENT = 1,
    RHULL_DUPLICATE_POINTS = 2,
    RHULL_ALL_COLLINEAR = 3,
    RHULL_EMPTY_INPUT = 4,
    RHULL_EMPTY_REGION = 5,
    RHULL_NONPOSITIVE_BANDWIDTH = 6,
    RHULL_ALPHA_OUT_OF_RANGE = 7,
    RHULL_SAMPLE_TOO_SMALL = 8,
    RHULL_DEGENERATE_SUPPORT = 9,
    RHULL_INVALID_ENDPOINTS = 10,
    RHULL_PARSE_ERROR = 11,
    RHULL_EMPTY_AFTER_FILTER = 12,
    RHULL_IO_ERROR = 13,
    RHULL_INTERNAL_ERROR = 99
} rhull_status;

typedef struct rhull_points rhull_points;
typedef struct rhull_region rhull_region;

RHULL_API const char* rhull_version(void);
RHULL_API const char* rhull_status_name(rhull_status status);
/* Message of the last failed call on this thread; "" after a success. */
RHULL_API const char* rhull_last_error(void);
RHULL_API void rhull_string_free(char* s);

/* ---- samples ------------------------------------------------------------ */

/* xy holds n interleaved x, y pairs. Exact duplicates are rejected. */
RHULL_API rhull_status rhull_points_create(const double* xy, size_t n, rhull_points** out);

/*
 * Reads a CSV or GeoJSON occurrence file. options_json (may be NULL):
 *   {"format": "auto" | "csv" | "geojson",
 *    "date_from": "2016-01-01", "date_to": "2016-12-31", "species": "...",
 *    "equirectangular": false}
 * With "equirectangular" the x coordinates are multiplied by the cosine of the
 * mean latitude; regions built from these points undo it on export.
 * report_json (may be NULL) receives rows kept, diagnostics, warnings,
 * detected columns and the SHA-256 of the file.
 */
RHULL_API rhull_status rhull_points_read(const char* path, const char* options_json, rhull_points** out,
                                         char** report_json);

RHULL_API size_t rhull_points_count(const rhull_points* points);
/* Coordinates as used for computation (after any scaling). */
RHULL_API rhull_status rhull_points_get(const rhull_points* points, size_t i, double* x, double* y);
/* Order-sensitive 64-bit hash of the coordinates. */
RHULL_API uint64_t rhull_points_hash(const rhull_points* points);
RHULL_API void rhull_points_free(rhull_points* points);

/* ---- regions ------------------------------------------------------------ */

/* C_r of the sample; r = INFINITY gives the convex hull. */
RHULL_API rhull_status rhull_hull_create(const rhull_points* points, double r, rhull_region** out);

/* {"radius", "area", "components", "boundary_length", "isolated_points", "loops"} */
RHULL_API rhull_status rhull_region_summary(const rhull_region* region, char** json);
RHULL_API rhull_status rhull_region_contains(const rhull_region* region, double x, double y, int* inside);

/* options_json (may be NULL): {"chord_tolerance": 0, "properties": {...}} */
RHULL_API rhull_status rhull_region_geojson(const rhull_region* region, const char* options_json, char** out);
/* options_json (may be NULL): {"chord_tolerance": 0, "title": "..."} */
RHULL_API rhull_status rhull_region_svg(const rhull_region* region, const char* options_json, char** out);
RHULL_API void rhull_region_free(rhull_region* region);

/* ---- inference ---------------------------------------------------------- */

/*
 * Tests whether the support is r-convex at level alpha. options_json (may be
 * NULL): {"h0": 1, "bandwidth": 0, "angular_samples": 128, "exhaustive": false}.
 * result_json receives the decision, statistics and witness ball.
 */
RHULL_API rhull_status rhull_test(const rhull_points* points, double r, double alpha, const char* options_json,
                                  char** result_json);

/*
 * Selects r0 and builds the support estimate. config_json (may be NULL) takes
 * the selection fields alpha, iterations, max_components, r_min, r_max, nu,
 * h0, bandwidth, angular_samples, escalation_limit and seed. region may be
 * NULL when only the report is wanted.
 */
RHULL_API rhull_status rhull_estimate(const rhull_points* points, const char* config_json, rhull_region** region,
                                      char** result_json);

/* ---- simulation --------------------------------------------------------- */

/* Called after each replicate, never concurrently. */
typedef void (*rhull_progress_fn)(size_t done, size_t total, void* user);

/*
 * study: "level-power", "consistency" or "rate". config_json holds a "model"
 * object ({"support": {...}, "density": {...}}) next to the study fields.
 * rows_csv (may be NULL) receives the per-replicate table.
 */
RHULL_API rhull_status rhull_simulate(const char* study, const char* config_json, rhull_progress_fn progress,
                                      void* user, char** report_json, char** rows_csv);

/* ---- files -------------------------------------------------------------- */

RHULL_API rhull_status rhull_file_sha256(const char* path, char** hex);

#ifdef __cplusplus
}
#endif

#endif
