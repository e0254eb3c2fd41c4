#ifndef FLAGCERT_H
#define FLAGCERT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum FcStatus {
  FC_STATUS_OK = 0,
  FC_STATUS_NULL_POINTER = 1,
  FC_STATUS_INVALID_UTF8 = 2,
  FC_STATUS_INVALID_ARGUMENT = 3,
  FC_STATUS_PARSE_ERROR = 4,
  FC_STATUS_VERIFICATION_FAILED = 5,
  FC_STATUS_OUT_OF_RANGE = 6,
  FC_STATUS_PANIC = 7,
} FcStatus;

// Flags of one type and size, in canonical order.
typedef struct FcBasis FcBasis;

// Parsed certificate.
typedef struct FcCertificate FcCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *fc_version(void);

// Message for the most recent failure on this thread, or NULL. The caller
// frees the copy with [`fc_string_free`].
char *fc_last_error(void);

// # Safety
// `s` must be NULL or a string returned by this library and not yet freed.
void fc_string_free(char *s);

// Parses certificate text into a new handle stored in `*out`.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum FcStatus fc_certificate_parse(const char *text, struct FcCertificate **out);

// Verifies the certificate with exact arithmetic. On success the recomputed
// bound is written to `*bound` as `numerator/denominator`; `bound` may be
// NULL.
//
// # Safety
// `cert` must be a live handle; `bound` must be NULL or valid.
enum FcStatus fc_certificate_verify(const struct FcCertificate *cert, char **bound);

// Claimed bound as `numerator/denominator`.
//
// # Safety
// `cert` must be a live handle and `out` a valid pointer.
enum FcStatus fc_certificate_bound(const struct FcCertificate *cert, char **out);

// Canonical text encoding of the certificate.
//
// # Safety
// `cert` must be a live handle and `out` a valid pointer.
enum FcStatus fc_certificate_to_string(const struct FcCertificate *cert, char **out);

// # Safety
// `cert` must be NULL or a handle from [`fc_certificate_parse`] not yet freed.
void fc_certificate_free(struct FcCertificate *cert);

// Enumerates the flags with `size` vertices over the type whose adjacency is
// given by `type_bits` (upper-triangular rows on `type_order` vertices).
//
// # Safety
// `type_bits` must be a NUL-terminated string and `out` a valid pointer.
enum FcStatus fc_basis_new(uintptr_t type_order,
                           const char *type_bits,
                           uintptr_t size,
                           struct FcBasis **out);

// Number of flags in the basis, or 0 for a NULL handle.
//
// # Safety
// `basis` must be NULL or a live handle.
uintptr_t fc_basis_len(const struct FcBasis *basis);

// Adjacency bitstring of flag `index`; its roots are the leading vertices.
//
// # Safety
// `basis` must be a live handle and `out` a valid pointer.
enum FcStatus fc_basis_flag_bits(const struct FcBasis *basis, uintptr_t index, char **out);

// # Safety
// `basis` must be NULL or a handle from [`fc_basis_new`] not yet freed.
void fc_basis_free(struct FcBasis *basis);

// Induced density of the small flag in the large flag, both rooted at their
// first `roots` vertices, written as `numerator/denominator`.
//
// # Safety
// Both bitstrings must be NUL-terminated and `out` a valid pointer.
enum FcStatus fc_density(uintptr_t roots,
                         uintptr_t small_order,
                         const char *small_bits,
                         uintptr_t large_order,
                         const char *large_bits,
                         char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLAGCERT_H */
