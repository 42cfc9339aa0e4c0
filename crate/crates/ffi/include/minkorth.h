#ifndef MINKORTH_H
#define MINKORTH_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result codes. Zero is success.
typedef enum MkStatus {
  MK_STATUS_OK = 0,
  MK_STATUS_NULL_POINTER = 1,
  MK_STATUS_DIMENSION_MISMATCH = 2,
  MK_STATUS_INVALID_GAUGE = 3,
  MK_STATUS_DOMAIN = 4,
  MK_STATUS_NUMERICAL = 5,
  MK_STATUS_PARSE = 6,
  MK_STATUS_PANIC = 7,
} MkStatus;

// Opaque gauge handle. Free with `mk_gauge_free`.
typedef struct MkGauge MkGauge;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. Valid until
// the next failing call on the same thread.
const char *mk_last_error(void);

// Library version, static storage.
const char *mk_version(void);

// Gauge from its JSON description (NUL-terminated UTF-8).
//
// # Safety
// `json` must be a valid C string and `out` writable.
enum MkStatus mk_gauge_from_json(const char *json, struct MkGauge **out);

// `m` normals of dimension `d`, row-major.
//
// # Safety
// `normals` must hold `m * d` doubles.
enum MkStatus mk_gauge_polytope_h(const double *normals, size_t m, size_t d, struct MkGauge **out);

// `m` vertices of dimension `d`, row-major.
//
// # Safety
// `vertices` must hold `m * d` doubles.
enum MkStatus mk_gauge_polytope_v(const double *vertices, size_t m, size_t d, struct MkGauge **out);

// Unit ball `(x - c)^T Q (x - c) <= 1`; `q` is `d * d` row-major.
//
// # Safety
// `q` must hold `d * d` doubles and `c` `d` doubles.
enum MkStatus mk_gauge_ellipsoid(const double *q, const double *c, size_t d, struct MkGauge **out);

// Frees a handle. NULL is ignored.
//
// # Safety
// `g` must come from one of the constructors and not be freed twice.
void mk_gauge_free(struct MkGauge *g);

// Ambient dimension, 0 for NULL.
//
// # Safety
// `g` must be NULL or a live handle.
size_t mk_gauge_dim(const struct MkGauge *g);

// # Safety
// `x` must hold `len` doubles.
enum MkStatus mk_gauge_eval(const struct MkGauge *g, const double *x, size_t len, double *out);

// # Safety
// `xs` must hold `len` doubles.
enum MkStatus mk_gauge_polar(const struct MkGauge *g, const double *xs, size_t len, double *out);

// `gamma'_eps(x; y)`.
//
// # Safety
// `x` and `y` must hold `len` doubles.
enum MkStatus mk_directional_derivative(const struct MkGauge *g,
                                        const double *x,
                                        const double *y,
                                        size_t len,
                                        double eps,
                                        double *out);

// Whether `x` is eps-Birkhoff orthogonal to `y`.
//
// # Safety
// `x` and `y` must hold `len` doubles.
enum MkStatus mk_birkhoff_test(const struct MkGauge *g,
                               const double *x,
                               const double *y,
                               size_t len,
                               double eps,
                               bool *out);

// `{alpha : x is eps-orthogonal to alpha x + y}`.
//
// # Safety
// `x` and `y` must hold `len` doubles.
enum MkStatus mk_right_interval(const struct MkGauge *g,
                                const double *x,
                                const double *y,
                                size_t len,
                                double eps,
                                double *lo,
                                double *hi);

// `{alpha : alpha x + y is eps-orthogonal to x}`.
//
// # Safety
// `x` and `y` must hold `len` doubles.
enum MkStatus mk_left_interval(const struct MkGauge *g,
                               const double *x,
                               const double *y,
                               size_t len,
                               double eps,
                               double *lo,
                               double *hi);

// `{alpha : alpha x + y is isosceles orthogonal to x}`.
//
// # Safety
// `x` and `y` must hold `len` doubles.
enum MkStatus mk_isosceles_interval(const struct MkGauge *g,
                                    const double *x,
                                    const double *y,
                                    size_t len,
                                    double *lo,
                                    double *hi);

// Best approximation of `y` from `span(basis)`; `basis` is `k * len`
// row-major. Writes the minimizer to `point` (`len` doubles), the
// distance to `value` and, if non-NULL, a certificate to `certificate`.
//
// # Safety
// Buffers must have the sizes above.
enum MkStatus mk_best_approximation(const struct MkGauge *g,
                                    const double *basis,
                                    size_t k,
                                    const double *y,
                                    size_t len,
                                    double *point,
                                    double *value,
                                    double *certificate);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MINKORTH_H */
