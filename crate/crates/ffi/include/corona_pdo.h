#ifndef CORONA_PDO_H
#define CORONA_PDO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum CpdoStatus {
  CPDO_STATUS_OK = 0,
  CPDO_STATUS_INVALID_GROUP = 1,
  CPDO_STATUS_GRID_MISMATCH = 2,
  CPDO_STATUS_BAND_VIOLATION = 3,
  CPDO_STATUS_DIMENSION = 4,
  CPDO_STATUS_INVALID_ARGUMENT = 5,
  CPDO_STATUS_UNSUPPORTED = 6,
  CPDO_STATUS_NUMERICAL = 7,
  CPDO_STATUS_CONFIG = 8,
  CPDO_STATUS_IO = 9,
  CPDO_STATUS_NULL_POINTER = 10,
  CPDO_STATUS_INVALID_UTF8 = 11,
  CPDO_STATUS_PANIC = 12,
  CPDO_STATUS_OTHER = 13,
} CpdoStatus;

// Discretized group together with its full dual.
typedef struct CpdoGroup CpdoGroup;

// Dense operator `Op(f)` on a group.
typedef struct CpdoOperator CpdoOperator;

// `re + i·im`, layout-compatible with `double[2]`.
typedef struct CpdoComplex {
  double re;
  double im;
} CpdoComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the next failing call.
const char *cpdo_last_error_message(void);

// Library version as a static string.
const char *cpdo_version(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must come from this library and not have been freed.
void cpdo_string_free(char *s);

// Parses a group descriptor such as `{"kind": "finite-cyclic", "order": 8}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum CpdoStatus cpdo_group_from_json(const char *json, struct CpdoGroup **out);

// # Safety
// `g` must be null or a handle from [`cpdo_group_from_json`].
void cpdo_group_free(struct CpdoGroup *g);

// Number of grid points (0 for a null handle).
//
// # Safety
// `g` must be null or a live group handle.
size_t cpdo_group_len(const struct CpdoGroup *g);

// Fourier transform onto the dual grid; `input` and `output` hold `len` = group length values.
//
// # Safety
// Buffers must hold `len` elements; `g` must be a live group handle.
enum CpdoStatus cpdo_fourier(const struct CpdoGroup *g,
                             const struct CpdoComplex *input,
                             size_t len,
                             struct CpdoComplex *output);

// Inverse Fourier transform from the dual grid.
//
// # Safety
// As for [`cpdo_fourier`].
enum CpdoStatus cpdo_inverse_fourier(const struct CpdoGroup *g,
                                     const struct CpdoComplex *input,
                                     size_t len,
                                     struct CpdoComplex *output);

// Dense `Op(γ ⊗ ψ)` on the group and its full dual; `gamma` and `psi` are
// family names such as `"trig:2:1"` and `"vo:sqrt"`.
//
// # Safety
// Strings must be NUL-terminated; `g` a live group handle; `out` valid.
enum CpdoStatus cpdo_operator_from_tensor(const struct CpdoGroup *g,
                                          const char *gamma,
                                          const char *psi,
                                          struct CpdoOperator **out);

// # Safety
// `op` must be null or a handle from [`cpdo_operator_from_tensor`].
void cpdo_operator_free(struct CpdoOperator *op);

// Side length of the operator matrix (0 for a null handle).
//
// # Safety
// `op` must be null or a live operator handle.
size_t cpdo_operator_dim(const struct CpdoOperator *op);

// Copies the matrix in row-major order into `out`, which holds `len = dim²` values.
//
// # Safety
// `out` must hold `len` elements; `op` must be a live handle.
enum CpdoStatus cpdo_operator_copy_matrix(const struct CpdoOperator *op,
                                          struct CpdoComplex *out,
                                          size_t len);

// `output = Op(f) input`, both of length `dim`.
//
// # Safety
// Buffers must hold `len` elements; `op` must be a live handle.
enum CpdoStatus cpdo_operator_apply(const struct CpdoOperator *op,
                                    const struct CpdoComplex *input,
                                    size_t len,
                                    struct CpdoComplex *output);

// Runs a JSON run configuration. On success `*report` receives the JSON
// report (free with [`cpdo_string_free`]) and `*exit_code` is 0, or 2 when a
// contract violation was detected. Relative paths resolve against the working directory.
//
// # Safety
// `config_json` must be NUL-terminated; `report` and `exit_code` valid pointers.
enum CpdoStatus cpdo_run_config(const char *config_json, char **report, int32_t *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CORONA_PDO_H */
