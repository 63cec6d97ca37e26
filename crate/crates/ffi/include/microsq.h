#ifndef MICROSQ_H
#define MICROSQ_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/*
 Distance convention for [`microsq_sphere_min_spacing`].
 */
typedef enum MicrosqMetric {
  MICROSQ_METRIC_EUCLIDEAN = 0,
  MICROSQ_METRIC_SQUARED_EUCLIDEAN = 1,
} MicrosqMetric;

/*
 Result codes.
 */
typedef enum MicrosqStatus {
  MICROSQ_STATUS_OK = 0,
  MICROSQ_STATUS_NULL_POINTER = 1,
  MICROSQ_STATUS_INVALID_ARGUMENT = 2,
  MICROSQ_STATUS_OUT_OF_RANGE = 3,
  MICROSQ_STATUS_NOT_FOUND = 4,
  MICROSQ_STATUS_BUFFER_TOO_SMALL = 5,
  MICROSQ_STATUS_CONVERGENCE_FAILURE = 6,
  MICROSQ_STATUS_INVARIANT_VIOLATION = 7,
  MICROSQ_STATUS_INTERNAL_ERROR = 8,
  MICROSQ_STATUS_PANIC = 9,
} MicrosqStatus;

/*
 Local factors of the multiplicative singular series.
 */
typedef struct MicrosqLocalTable MicrosqLocalTable;

/*
 Integer points on a sphere.
 */
typedef struct MicrosqSpherePoints MicrosqSpherePoints;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Static description of a status code.
 */
const char *microsq_status_message(enum MicrosqStatus status);

/*
 Copies the last error message of this thread into `buf` (NUL-terminated,
 truncated to `capacity`). Returns the full message length without the NUL,
 or 0 when there is no message.

 # Safety
 `buf` must be null or valid for `capacity` bytes.
 */
uintptr_t microsq_last_error(char *buf, uintptr_t capacity);

/*
 Prime factorization of `n` into parallel arrays. On
 `MICROSQ_STATUS_BUFFER_TOO_SMALL`, `*out_len` holds the required length.

 # Safety
 `primes` and `exponents` must be valid for `capacity` elements (they may
 be null when `capacity` is 0); `out_len` must be valid.
 */
enum MicrosqStatus microsq_factorize(uint64_t n,
                                     uint64_t *primes,
                                     uint32_t *exponents,
                                     uintptr_t capacity,
                                     uintptr_t *out_len);

/*
 Legendre symbol `(b / p)` for an odd prime `p`.

 # Safety
 `out` must be valid for writes.
 */
enum MicrosqStatus microsq_legendre(int64_t b, uint64_t p, int8_t *out);

/*
 Eligibility tags of `n` as a bitmask (bit `k` for class `k`).

 # Safety
 `out_bits` must be valid for writes.
 */
enum MicrosqStatus microsq_classify(uint64_t n, uint8_t *out_bits);

/*
 Quadratic Gauss sum `S(q, a)` for `gcd(a, q) = 1`.

 # Safety
 `out_re` and `out_im` must be valid for writes.
 */
enum MicrosqStatus microsq_gauss_sum(uint64_t q, int64_t a, double *out_re, double *out_im);

/*
 Local density `A(q; n)`.

 # Safety
 `out` must be valid for writes.
 */
enum MicrosqStatus microsq_a_term(uint64_t q, uint64_t n, double *out);

/*
 Truncated singular series: multiplicative when `multiplicative` is
 true, additive otherwise.

 # Safety
 `out` must be valid for writes.
 */
enum MicrosqStatus microsq_singular_series(uint64_t n, double w, bool multiplicative, double *out);

/*
 Number of representations `n = x1^2 + x2^2 + x3^2` with `x3 <= y`.

 # Safety
 `out` must be valid for writes.
 */
enum MicrosqStatus microsq_count_reps(uint64_t n,
                                      uint64_t y,
                                      bool ordered,
                                      bool allow_zero,
                                      uint64_t *out);

/*
 Least microsquare of `n`; `MICROSQ_STATUS_NOT_FOUND` when none exists.

 # Safety
 `out` must be valid for writes.
 */
enum MicrosqStatus microsq_min_microsquare(uint64_t n, uint64_t *out);

/*
 Enumerates the integer points on the sphere of radius `sqrt(n)`.

 # Safety
 `out` must be valid for writes.
 */
enum MicrosqStatus microsq_sphere_new(uint64_t n, struct MicrosqSpherePoints **out);

/*
 # Safety
 `handle` must come from [`microsq_sphere_new`]; `out` must be valid.
 */
enum MicrosqStatus microsq_sphere_len(const struct MicrosqSpherePoints *handle, uintptr_t *out);

/*
 Writes point `index` (in lexicographic order) to `out_xyz[0..3]`.

 # Safety
 `handle` must come from [`microsq_sphere_new`]; `out_xyz` must be valid
 for three writes.
 */
enum MicrosqStatus microsq_sphere_get(const struct MicrosqSpherePoints *handle,
                                      uintptr_t index,
                                      int64_t *out_xyz);

/*
 Minimum spacing of the normalized points; `MICROSQ_STATUS_NOT_FOUND`
 with fewer than two points.

 # Safety
 `handle` must come from [`microsq_sphere_new`]; `out` must be valid.
 */
enum MicrosqStatus microsq_sphere_min_spacing(const struct MicrosqSpherePoints *handle,
                                              enum MicrosqMetric metric,
                                              double *out);

/*
 # Safety
 `handle` must be null or come from [`microsq_sphere_new`], and must not
 be used afterwards.
 */
void microsq_sphere_free(struct MicrosqSpherePoints *handle);

/*
 Local factors `sum_{h <= H(p)} A(p^h; n)` for the primes `p <= w`.

 # Safety
 `out` must be valid for writes.
 */
enum MicrosqStatus microsq_local_table_new(uint64_t n, double w, struct MicrosqLocalTable **out);

/*
 # Safety
 `handle` must come from [`microsq_local_table_new`]; `out` must be valid.
 */
enum MicrosqStatus microsq_local_table_len(const struct MicrosqLocalTable *handle, uintptr_t *out);

/*
 Row `index`: the prime, its exponent bound `H(p)` and the partial sum.

 # Safety
 `handle` must come from [`microsq_local_table_new`]; the out-pointers
 must be valid.
 */
enum MicrosqStatus microsq_local_table_row(const struct MicrosqLocalTable *handle,
                                           uintptr_t index,
                                           uint64_t *out_p,
                                           uint32_t *out_h,
                                           double *out_partial_sum);

/*
 Product of all local factors.

 # Safety
 `handle` must come from [`microsq_local_table_new`]; `out` must be valid.
 */
enum MicrosqStatus microsq_local_table_value(const struct MicrosqLocalTable *handle, double *out);

/*
 # Safety
 `handle` must be null or come from [`microsq_local_table_new`], and must
 not be used afterwards.
 */
void microsq_local_table_free(struct MicrosqLocalTable *handle);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MICROSQ_H */
