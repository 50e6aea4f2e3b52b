#ifndef QDC_H
#define QDC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QdcStatus {
  QDC_STATUS_OK = 0,
  QDC_STATUS_NULL_POINTER = 1,
  QDC_STATUS_INVALID_UTF8 = 2,
  QDC_STATUS_PARSE = 3,
  QDC_STATUS_INDEX_OUT_OF_RANGE = 4,
  QDC_STATUS_INVALID_ARGUMENT = 5,
  QDC_STATUS_UNAVAILABLE = 6,
  QDC_STATUS_BUDGET_EXCEEDED = 7,
  QDC_STATUS_MIXED_N = 8,
  QDC_STATUS_INTERNAL = 9,
  QDC_STATUS_PANIC = 10,
} QdcStatus;

// Aggregate verdict of a suite; values match the `qdc check` exit codes.
typedef enum QdcVerdict {
  QDC_VERDICT_PASS = 0,
  QDC_VERDICT_FAIL = 1,
  QDC_VERDICT_SKIP = 3,
} QdcVerdict;

typedef struct QdcPolynomial QdcPolynomial;

typedef struct QdcPresentation QdcPresentation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty if none. The
// pointer stays valid until the next failing call on the same thread.
const char *qdc_last_error(void);

// Build presentation `name` (`frt_T`, `swz`, `lbasis`, `fp`) at dimension `n`.
//
// # Safety
// `name` must be a valid C string, `convention` null or a valid C string,
// `out` a valid pointer.
enum QdcStatus qdc_presentation_new(const char *name,
                                    size_t n,
                                    const char *convention,
                                    struct QdcPresentation **out);

// # Safety
// `p` is null or a handle from [`qdc_presentation_new`] not yet freed.
void qdc_presentation_free(struct QdcPresentation *p);

// Number of oriented rules; 0 for a null handle.
//
// # Safety
// `p` is null or a live presentation handle.
size_t qdc_presentation_rule_count(const struct QdcPresentation *p);

// Parse an expression over `n × n` generators.
//
// # Safety
// `expr` must be a valid C string and `out` a valid pointer.
enum QdcStatus qdc_polynomial_parse(size_t n, const char *expr, struct QdcPolynomial **out);

// # Safety
// `p` is null or a polynomial handle not yet freed.
void qdc_polynomial_free(struct QdcPolynomial *p);

// # Safety
// `p` is null or a live polynomial handle. Null counts as zero.
bool qdc_polynomial_is_zero(const struct QdcPolynomial *p);

// Canonical text form; release with [`qdc_string_free`].
//
// # Safety
// `p` is a live polynomial handle and `out` a valid pointer.
enum QdcStatus qdc_polynomial_to_string(const struct QdcPolynomial *p, char **out);

// Normal form of `poly` in `pres`, as a new polynomial handle.
//
// # Safety
// Both handles live, `out` a valid pointer.
enum QdcStatus qdc_reduce(const struct QdcPresentation *pres,
                          const struct QdcPolynomial *poly,
                          struct QdcPolynomial **out);

// Parse `expr` and return its normal form as a string.
//
// # Safety
// `pres` live, `expr` a valid C string, `out` a valid pointer.
enum QdcStatus qdc_reduce_str(const struct QdcPresentation *pres, const char *expr, char **out);

// Run a check suite (`all`, `matrix`, `swz`, `lbasis`, `fp-embed`).
// `budget_ms == 0` means unlimited. If `report_json` is non-null it receives
// the JSON report, to be released with [`qdc_string_free`].
//
// # Safety
// `suite` a valid C string, `verdict` a valid pointer, `report_json` null
// or a valid pointer.
enum QdcStatus qdc_check_suite(const char *suite,
                               size_t n,
                               uint64_t budget_ms,
                               enum QdcVerdict *verdict,
                               char **report_json);

// # Safety
// `s` is null or a string returned by this library, not yet freed.
void qdc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QDC_H */
