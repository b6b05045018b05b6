#ifndef GAUSSGAP_H
#define GAUSSGAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

#define GG_OK 0

#define GG_NULL_POINTER 1

#define GG_PANIC 2

#define GG_INVALID_UTF8 3

#define GG_BUFFER_TOO_SMALL 4

// Opaque model handle.
typedef struct GgModel GgModel;

typedef struct GgClosedForms {
  double gamma;
  double g;
  double g_breve;
  double sigma;
} GgClosedForms;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a JSON model file.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer. On
// success `*out` owns a handle to release with [`gg_model_free`].
int32_t gg_model_from_json(const char *json, struct GgModel **out);

// One-mode model with `L₁ = μa`, `L₂ = λa†`, `H = Ωa†a + κ(a†² + a²)/2`.
//
// # Safety
// `out` must be a valid pointer.
int32_t gg_model_one_dim(double mu2,
                         double lambda2,
                         double omega,
                         double kappa,
                         struct GgModel **out);

// # Safety
// `model` must be null or a handle from this library not yet freed.
void gg_model_free(struct GgModel *model);

// # Safety
// `model` must be a live handle; `d` and `m` valid pointers.
int32_t gg_model_dims(const struct GgModel *model, size_t *d, size_t *m);

// GNS spectral gap; `*has_gap` is 1 when the gap is positive.
//
// # Safety
// `model` must be a live handle; `g` and `has_gap` valid pointers.
int32_t gg_gap_gns(const struct GgModel *model, double *g, int32_t *has_gap);

// KMS spectral gap.
//
// # Safety
// `model` must be a live handle; `g_breve` a valid pointer.
int32_t gg_gap_kms(const struct GgModel *model, double *g_breve);

// Full analysis report as JSON. Release `*out` with [`gg_string_free`].
//
// # Safety
// `model` must be a live handle; `out` a valid pointer.
int32_t gg_analyze_json(const struct GgModel *model, char **out);

// # Safety
// `s` must be null or a string returned by this library not yet freed.
void gg_string_free(char *s);

// Message of the last failure on this thread. The pointer stays valid
// until the next failing call on the same thread.
const char *gg_last_error_message(void);

// Invariant covariance `S`, row-major `2d × 2d`.
//
// # Safety
// `model` must be a live handle; `buf` must hold `len` doubles.
int32_t gg_stationary_covariance(const struct GgModel *model, double *buf, size_t len);

// `𝒯_t(W(z)) = e^{decay + i·phase} W(z_t)`. `z` and `z_t` hold `d`
// interleaved `re, im` pairs (`len = 2d`).
//
// # Safety
// `model` must be a live handle; `z` and `z_t` must hold `len` doubles;
// `decay` and `phase` must be valid pointers.
int32_t gg_weyl_evolve(const struct GgModel *model,
                       const double *z,
                       size_t len,
                       double t,
                       double *decay,
                       double *phase,
                       double *z_t);

// Closed-form gaps of the one-mode family.
//
// # Safety
// `out` must be a valid pointer.
int32_t gg_one_dim_closed_forms(double mu2,
                                double lambda2,
                                double omega,
                                double kappa,
                                struct GgClosedForms *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GAUSSGAP_H */
