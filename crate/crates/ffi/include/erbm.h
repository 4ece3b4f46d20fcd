#ifndef ERBM_H
#define ERBM_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum ErbmStatus {
  ERBM_STATUS_OK = 0,
  ERBM_STATUS_NULL_POINTER = 1,
  ERBM_STATUS_INVALID_ARGUMENT = 2,
  // Malformed domain text; the message names the line.
  ERBM_STATUS_PARSE = 3,
  // Curves that are not simple, misoriented or intersecting.
  ERBM_STATUS_INVALID_DOMAIN = 4,
  ERBM_STATUS_ILL_CONDITIONED = 5,
  ERBM_STATUS_CLEARANCE_TOO_SMALL = 6,
  ERBM_STATUS_OUTSIDE_DOMAIN = 7,
  // Any other numerical failure.
  ERBM_STATUS_COMPUTATION = 8,
  ERBM_STATUS_PANIC = 9,
} ErbmStatus;

// A validated domain.
typedef struct ErbmDomain ErbmDomain;

// The ER machinery (period matrix, collars, restart densities) of one domain.
typedef struct ErbmSystem ErbmSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null after a success.
// The pointer stays valid until the next call into this library on the same thread.
const char *erbm_last_error_message(void);

// Static name of a status code.
const char *erbm_status_name(enum ErbmStatus status);

// Parses a domain file (`outer`/`hole` lines) with `nodes` collocation nodes per curve
// (0 selects the default).
//
// # Safety
// `text` must be a NUL-terminated string and `out` valid for writes.
enum ErbmStatus erbm_domain_parse(const char *text, uintptr_t nodes, struct ErbmDomain **out);

// Releases a domain; null is ignored.
//
// # Safety
// `domain` must come from [`erbm_domain_parse`] and not be used afterwards.
void erbm_domain_free(struct ErbmDomain *domain);

// Number of holes, or 0 for a null handle.
//
// # Safety
// `domain` must be null or a live handle.
uintptr_t erbm_domain_hole_count(const struct ErbmDomain *domain);

// Whether `(x, y)` lies in the domain; false for a null handle.
//
// # Safety
// `domain` must be null or a live handle.
bool erbm_domain_contains(const struct ErbmDomain *domain, double x, double y);

// Poisson kernel `H_D(z, w)` for `z = (x, y)` and `w` the outer boundary point with parameter `t`.
//
// # Safety
// `domain` must be a live handle and `out` valid for writes.
enum ErbmStatus erbm_poisson_kernel(const struct ErbmDomain *domain,
                                    double x,
                                    double y,
                                    double t,
                                    double *out);

// Green's function `G_D(z, w)` with the positive `−(1/π) log|z − w|` normalization.
//
// # Safety
// `domain` must be a live handle and `out` valid for writes.
enum ErbmStatus erbm_green(const struct ErbmDomain *domain,
                           double zx,
                           double zy,
                           double wx,
                           double wy,
                           double *out);

// Builds the ER system with collars at `collar` times each hole's clearance.
//
// # Safety
// `domain` must be a live handle and `out` valid for writes. The system does not
// borrow the domain, which may be freed afterwards.
enum ErbmStatus erbm_system_new(const struct ErbmDomain *domain,
                                double collar,
                                struct ErbmSystem **out);

// Releases a system; null is ignored.
//
// # Safety
// `system` must come from [`erbm_system_new`] and not be used afterwards.
void erbm_system_free(struct ErbmSystem *system);

// ER Poisson kernel `H^ER(z, w)` for `w` the outer boundary point with parameter `t`.
//
// # Safety
// `system` must be a live handle and `out` valid for writes.
enum ErbmStatus erbm_er_poisson_kernel(const struct ErbmSystem *system,
                                       double x,
                                       double y,
                                       double t,
                                       double *out);

// ER Green's function `G^ER(z, w)`.
//
// # Safety
// `system` must be a live handle and `out` valid for writes.
enum ErbmStatus erbm_er_green(const struct ErbmSystem *system,
                              double zx,
                              double zy,
                              double wx,
                              double wy,
                              double *out);

// Writes the boundary chain row-major into `out`: `n` rows of `n + 1` entries for
// `n` holes, row `i` holding hole `i + 1` and columns `0..=n` the target components.
// With `jumps` false the entries are the next-hit probabilities `q`, otherwise the
// jump probabilities `p̃` (self-hits removed).
//
// # Safety
// `system` must be a live handle and `out` valid for `len` writes.
enum ErbmStatus erbm_boundary_chain(const struct ErbmSystem *system,
                                    bool jumps,
                                    double *out,
                                    uintptr_t len);

// Inner radius of the bilateral slit map sending hole `hole` to the inner circle.
//
// # Safety
// `system` must be a live handle and `out` valid for writes.
enum ErbmStatus erbm_bilateral_inner_radius(const struct ErbmSystem *system,
                                            uintptr_t hole,
                                            double *out);

// Samples `paths` ERBM paths and bins their exits on the outer curve into `bins`
// equal parameter arcs. Paths start on hole `hole`, or at `(x, y)` when `hole` is 0.
// Writes the empirical frequencies to `frequencies` (length `bins`) and the total
// variation distance to the ER harmonic measure to `total_variation`.
//
// # Safety
// `system` must be a live handle, `frequencies` valid for `bins` writes and
// `total_variation` valid for one write.
enum ErbmStatus erbm_sample_exit(const struct ErbmSystem *system,
                                 uintptr_t hole,
                                 double x,
                                 double y,
                                 uintptr_t bins,
                                 uintptr_t paths,
                                 uint64_t seed,
                                 double *frequencies,
                                 double *total_variation);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ERBM_H */
