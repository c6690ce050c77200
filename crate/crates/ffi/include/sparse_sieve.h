#ifndef SPARSE_SIEVE_H
#define SPARSE_SIEVE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum SsStatus {
  SS_STATUS_OK = 0,
  SS_STATUS_NULL_POINTER = 1,
  SS_STATUS_INVALID_ARGUMENT = 2,
  SS_STATUS_NOT_COPRIME = 3,
  SS_STATUS_EMPTY_SET = 4,
  SS_STATUS_CAPACITY_EXCEEDED = 5,
  SS_STATUS_IO = 6,
  SS_STATUS_NUMERICAL = 7,
  SS_STATUS_INTERNAL = 8,
} SsStatus;

// The Farey fractions `a/q`, `(a,q) = 1`, over a moduli set, sorted.
typedef struct SsFarey SsFarey;

// A finite set of moduli.
typedef struct SsModuli SsModuli;

// A coefficient sequence `a_1..a_N`.
typedef struct SsSequence SsSequence;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer
// stays valid until the next call on the same thread.
const char *ss_last_error(void);

// Static description of a status code.
const char *ss_status_name(enum SsStatus status);

// Builds a sequence from a spec such as `"ones"`, `"delta:3"`,
// `"random_phases"` or `"focused:1/4"`.
//
// # Safety
// `spec` must be a NUL-terminated string and `out` a valid pointer.
enum SsStatus ss_sequence_new(const char *spec, size_t n, uint64_t seed, struct SsSequence **out);

// Builds a sequence from `n` real and `n` imaginary parts; `im` may be
// NULL for a real sequence.
//
// # Safety
// `re` (and `im` when non-null) must point to `n` readable doubles.
enum SsStatus ss_sequence_from_values(const double *re,
                                      const double *im,
                                      size_t n,
                                      struct SsSequence **out);

// # Safety
// `seq` must come from an `ss_sequence_*` constructor, or be NULL.
void ss_sequence_free(struct SsSequence *seq);

// `N`, or 0 for NULL.
//
// # Safety
// `seq` must be a live sequence or NULL.
size_t ss_sequence_len(const struct SsSequence *seq);

// `Z = Σ|a_n|²`.
//
// # Safety
// Pointers must be valid.
enum SsStatus ss_sequence_energy(const struct SsSequence *seq, double *out);

// `S(α) = Σ a_n e(nα)`.
//
// # Safety
// Pointers must be valid.
enum SsStatus ss_exp_sum(const struct SsSequence *seq,
                         double alpha,
                         double *out_re,
                         double *out_im);

// Builds a moduli set from a spec (`"squares"`, `"octave"`, `"primes"`,
// `"list:1,4,9"`, `"file:path"`). `q` is the size expression (e.g.
// `"16"` or `"N^0.3"`, may be NULL), `q0` the octave base (ignored when
// not positive) and `n` the value substituted for `N` (ignored when not
// positive).
//
// # Safety
// `spec` must be a NUL-terminated string, `q` NULL or NUL-terminated, and
// `out` valid.
enum SsStatus ss_moduli_new(const char *spec,
                            const char *q,
                            double q0,
                            double n,
                            struct SsModuli **out);

// Builds an explicit set from `len` strictly increasing positive values.
//
// # Safety
// `values` must point to `len` readable integers (or be NULL with
// `len = 0`).
enum SsStatus ss_moduli_from_list(const uint64_t *values, size_t len, struct SsModuli **out);

// # Safety
// `set` must come from an `ss_moduli_*` constructor, or be NULL.
void ss_moduli_free(struct SsModuli *set);

// `|𝒮|`, or 0 for NULL.
//
// # Safety
// `set` must be a live set or NULL.
size_t ss_moduli_len(const struct SsModuli *set);

// Copies up to `cap` elements into `buf` and stores the set size in
// `out_len`.
//
// # Safety
// `buf` must have room for `cap` integers (may be NULL when `cap = 0`).
enum SsStatus ss_moduli_elements(const struct SsModuli *set,
                                 uint64_t *buf,
                                 size_t cap,
                                 size_t *out_len);

// `Σ_{q∈𝒮} Σ_{(a,q)=1} |S(a/q)|²`.
//
// # Safety
// Pointers must be valid.
enum SsStatus ss_sieve_lhs(const struct SsSequence *seq, const struct SsModuli *set, double *out);

// Sorted Farey fractions over `set`.
//
// # Safety
// Pointers must be valid.
enum SsStatus ss_farey_new(const struct SsModuli *set, struct SsFarey **out);

// # Safety
// `farey` must come from [`ss_farey_new`], or be NULL.
void ss_farey_free(struct SsFarey *farey);

// Number of fractions, or 0 for NULL.
//
// # Safety
// `farey` must be a live list or NULL.
size_t ss_farey_len(const struct SsFarey *farey);

// The `index`-th fraction `a/q` in increasing order.
//
// # Safety
// Pointers must be valid.
enum SsStatus ss_farey_get(const struct SsFarey *farey,
                           size_t index,
                           uint64_t *out_a,
                           uint64_t *out_q);

// `K(Δ)`: most fractions within circular distance `Δ` of one point.
//
// # Safety
// Pointers must be valid.
enum SsStatus ss_k_delta(const struct SsFarey *farey, double delta, uint64_t *out);

// `Σ_{d=1}^{c} e((kd² + ld)/c)`.
//
// # Safety
// Output pointers must be valid.
enum SsStatus ss_gauss_sum(int64_t k, int64_t l, uint64_t c, double *out_re, double *out_im);

// Number of `x mod k` with `x²g ≡ l (mod k)`.
//
// # Safety
// `out` must be valid.
enum SsStatus ss_quad_root_count(uint64_t g, int64_t l, uint64_t k, uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPARSE_SIEVE_H */
