#ifndef KINETIC_H
#define KINETIC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

enum KrStatus
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  KR_STATUS_OK = 0,
  KR_STATUS_NULL_POINTER = 1,
  KR_STATUS_INVALID_ARGUMENT = 2,
  KR_STATUS_DOMAIN = 3,
  KR_STATUS_NO_CONVERGENCE = 4,
  KR_STATUS_PARSE = 5,
  KR_STATUS_NO_CONNECTION = 6,
  KR_STATUS_INTERNAL = 7,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum KrStatus KrStatus;
#else
typedef int32_t KrStatus;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

// Opaque model handle.
typedef struct KrModel KrModel;

// One value of the kinetic function.
typedef struct KrKineticSample {
  double phi_flat;
  double phi_sharp;
  double lambda;
  // 1 for a nonclassical shock, 0 at or above the threshold.
  int32_t nonclassical;
} KrKineticSample;

// Shock set: an optional isolated state and an interval.
typedef struct KrShockSet {
  int32_t has_isolated;
  double isolated;
  double lo;
  double hi;
  int32_t lo_closed;
  int32_t hi_closed;
} KrShockSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds a model from a JSON document.
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
KrStatus kr_model_from_json(const char *json, struct KrModel **out);

// Builds `f = K u³` with `b = c2 = 1` and `c1 = C`.
//
// # Safety
// `out` must be writable.
KrStatus kr_model_cubic(double k, double c, struct KrModel **out);

// Releases a model; null is ignored.
//
// # Safety
// `model` must come from `kr_model_*` and not be used afterwards.
void kr_model_free(struct KrModel *model);

// # Safety
// `model` must be a live handle and `out` writable.
KrStatus kr_kinetic_function(const struct KrModel *model,
                             double u0,
                             double alpha,
                             struct KrKineticSample *out);

// # Safety
// `model` must be a live handle and `out` writable.
KrStatus kr_critical_ratio(const struct KrModel *model, double u0, double u2, double *out);

// # Safety
// `model` must be a live handle and `out` writable.
KrStatus kr_threshold_ratio(const struct KrModel *model, double u0, double *out);

// # Safety
// `model` must be a live handle and `out` writable.
KrStatus kr_lambda_alpha(const struct KrModel *model, double u0, double alpha, double *out);

// # Safety
// `model` must be a live handle and `out` writable.
KrStatus kr_phi_natural(const struct KrModel *model, double u, double *out);

// # Safety
// `model` must be a live handle and `out` writable.
KrStatus kr_phi_zero(const struct KrModel *model, double u, double *out);

// # Safety
// `model` must be a live handle and `out` writable.
KrStatus kr_entropy_dissipation(const struct KrModel *model,
                                double u_minus,
                                double u_plus,
                                double *out);

// # Safety
// `model` must be a live handle and `out` writable.
KrStatus kr_shock_set(const struct KrModel *model,
                      double u_minus,
                      double alpha,
                      struct KrShockSet *out);

// Copies the last error message of this thread into `buf` (truncated and
// NUL-terminated) and returns the full message length without the NUL.
// Pass a null `buf` to query the length.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t kr_last_error_message(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KINETIC_H */
