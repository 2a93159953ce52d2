/* Generated by cbindgen from unitom-ffi. Do not edit. */

#ifndef UNITOM_H
#define UNITOM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum UnitomStatus {
  UNITOM_STATUS_OK = 0,
  UNITOM_STATUS_NULL_POINTER = 1,
  UNITOM_STATUS_INVALID_ARGUMENT = 2,
  UNITOM_STATUS_DIMENSION_MISMATCH = 3,
  UNITOM_STATUS_OUT_OF_RANGE = 4,
  UNITOM_STATUS_BUFFER_TOO_SMALL = 5,
  UNITOM_STATUS_CERTIFICATION_FAILED = 6,
  UNITOM_STATUS_NUMERICAL_FAILURE = 7,
  UNITOM_STATUS_IO = 8,
  UNITOM_STATUS_PANIC = 9,
} UnitomStatus;

// Opaque channel in Kraus form.
typedef struct UnitomChannel UnitomChannel;

// Opaque interactive observable set.
typedef struct UnitomObservableSet UnitomObservableSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *unitom_version(void);

// Message for the last failed call on this thread; empty after a success.
// Valid until the next call on the same thread.
const char *unitom_last_error(void);

// Builds the observable set for `question` (`among_rank_q`, `among_all` or
// `among_unital`).
enum UnitomStatus unitom_observable_set_build(size_t d,
                                              size_t q,
                                              const char *question,
                                              uint64_t seed,
                                              struct UnitomObservableSet **out);

// The six local Clifford observables for two qubits.
enum UnitomStatus unitom_observable_set_clifford(struct UnitomObservableSet **out);

enum UnitomStatus unitom_observable_set_count(const struct UnitomObservableSet *set, size_t *out);

// Local dimension `d`; observables are `d² × d²`.
enum UnitomStatus unitom_observable_set_dim(const struct UnitomObservableSet *set, size_t *out);

// Copies observable `index` into `re` and `im`, each of length at least `d⁴`.
enum UnitomStatus unitom_observable_set_observable(const struct UnitomObservableSet *set,
                                                   size_t index,
                                                   double *re,
                                                   double *im,
                                                   size_t len);

// Scale `c` of observable `index`; the measured value is `c(p₊ − p₋)`.
enum UnitomStatus unitom_observable_set_scale(const struct UnitomObservableSet *set,
                                              size_t index,
                                              double *out);

// Serializes the set; release the string with [`unitom_string_free`].
enum UnitomStatus unitom_observable_set_to_json(const struct UnitomObservableSet *set, char **out);

void unitom_observable_set_free(struct UnitomObservableSet *set);

void unitom_string_free(char *s);

// Channel from `count` Kraus operators of size `d × d`, concatenated
// row-major in `re` and `im` (each `count · d²` long). The operators must
// satisfy `Σ Aᵢ†Aᵢ = I`.
enum UnitomStatus unitom_channel_from_kraus(size_t d,
                                            size_t count,
                                            const double *re,
                                            const double *im,
                                            struct UnitomChannel **out);

// Haar-random unitary channel.
enum UnitomStatus unitom_channel_haar_unitary(size_t d, uint64_t seed, struct UnitomChannel **out);

// Random channel with `q` Kraus operators.
enum UnitomStatus unitom_channel_random(size_t d,
                                        size_t q,
                                        uint64_t seed,
                                        struct UnitomChannel **out);

void unitom_channel_free(struct UnitomChannel *ch);

// Exact expectations `tr(H_i J)` into `values` (length at least the set count).
enum UnitomStatus unitom_measure_exact(const struct UnitomObservableSet *set,
                                       const struct UnitomChannel *ch,
                                       double *values,
                                       size_t len);

// Finite-shot estimates; `std_errors` may be null.
enum UnitomStatus unitom_measure_sampled(const struct UnitomObservableSet *set,
                                         const struct UnitomChannel *ch,
                                         uint64_t shots,
                                         uint64_t seed,
                                         double *values,
                                         double *std_errors,
                                         size_t len);

// Whether the set separates two channels by more than `tol` under exact
// statistics; `gap` receives the largest componentwise difference.
enum UnitomStatus unitom_discriminate(const struct UnitomObservableSet *set,
                                      const struct UnitomChannel *a,
                                      const struct UnitomChannel *b,
                                      double tol,
                                      bool *distinguished,
                                      double *gap);

// Unitary fitting the exact expectations `values` (`len` = set count).
// `u_re`/`u_im` receive `d²` entries; `residual` and `converged` may be null.
enum UnitomStatus unitom_reconstruct_unitary(const struct UnitomObservableSet *set,
                                             const double *values,
                                             size_t len,
                                             size_t restarts,
                                             uint64_t seed,
                                             double *u_re,
                                             double *u_im,
                                             double *residual,
                                             bool *converged);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UNITOM_H */
