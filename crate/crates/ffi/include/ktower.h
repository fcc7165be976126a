#ifndef KTOWER_H
#define KTOWER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KtStatus {
  KT_STATUS_OK = 0,
  KT_STATUS_NULL_POINTER = 1,
  KT_STATUS_INVALID_ARGUMENT = 2,
  KT_STATUS_INVALID_TOWER = 3,
  KT_STATUS_PARSE = 4,
  KT_STATUS_DOMAIN = 5,
  KT_STATUS_VERIFICATION_FAILED = 6,
  KT_STATUS_EXHAUSTED = 7,
  KT_STATUS_INTERNAL = 8,
} KtStatus;

typedef enum KtMethod {
  KT_METHOD_CLOSED = 0,
  KT_METHOD_RECURRENCE = 1,
  KT_METHOD_HYPERGEOMETRIC = 2,
  KT_METHOD_ENUMERATE = 3,
} KtMethod;

/*
 Opaque lazy enumeration handle.
 */
typedef struct KtEnumerator KtEnumerator;

/*
 Opaque tower handle.
 */
typedef struct KtTower KtTower;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the most recent failure on this thread, or null. Valid until
 the next failing call on the same thread.
 */
const char *kt_last_error(void);

/*
 # Safety
 `s` must come from this library or be null.
 */
void kt_string_free(char *s);

/*
 Parses `{"k":K,"blocks":[[level,x],...]}`; the result is normalized and
 valid.

 # Safety
 `json` must be a nul-terminated string; `out` must be writable.
 */
enum KtStatus kt_tower_from_json(const char *json, struct KtTower **out);

/*
 # Safety
 `t` must come from this library or be null.
 */
void kt_tower_free(struct KtTower *t);

/*
 # Safety
 `t` must be a live handle; `out` must be writable.
 */
enum KtStatus kt_tower_to_json(const struct KtTower *t, char **out);

/*
 # Safety
 `t` must be a live handle; `out` must be writable.
 */
enum KtStatus kt_tower_render(const struct KtTower *t, char **out);

/*
 Block count, base size and width.

 # Safety
 `t` must be a live handle; the out pointers must be writable.
 */
enum KtStatus kt_tower_shape(const struct KtTower *t, size_t *k, size_t *n, size_t *b);

/*
 `KT_STATUS_OK` when valid, otherwise `KT_STATUS_INVALID_TOWER` with the
 violations in [`kt_last_error`].

 # Safety
 `t` must be a live handle.
 */
enum KtStatus kt_tower_validate(const struct KtTower *t);

/*
 Number of towers as a decimal string. `b = 0` counts every base size.

 # Safety
 `out` must be writable.
 */
enum KtStatus kt_count(size_t k, size_t n, size_t b, enum KtMethod method, char **out);

/*
 Reduces a tower with at least two blocks. The reduced tower goes to
 `out_tower`, its label as JSON to `out_label`.

 # Safety
 `t` must be a live handle; the out pointers must be writable.
 */
enum KtStatus kt_reduce(const struct KtTower *t, struct KtTower **out_tower, char **out_label);

/*
 Inverse of [`kt_reduce`].

 # Safety
 `t` must be a live handle, `label` a nul-terminated string, `out`
 writable.
 */
enum KtStatus kt_expand(const struct KtTower *t, const char *label, struct KtTower **out);

/*
 Lazily walks the `(n, b)` class in lexicographic order.

 # Safety
 `out` must be writable.
 */
enum KtStatus kt_enumerator_new(size_t k, size_t n, size_t b, struct KtEnumerator **out);

/*
 Next tower, or `KT_STATUS_EXHAUSTED` with `*out` set to null.

 # Safety
 `e` must be a live handle; `out` must be writable.
 */
enum KtStatus kt_enumerator_next(struct KtEnumerator *e, struct KtTower **out);

/*
 # Safety
 `e` must come from this library or be null.
 */
void kt_enumerator_free(struct KtEnumerator *e);

/*
 Runs every verification suite. The JSON report is written even when a
 check fails, in which case the status is `KT_STATUS_VERIFICATION_FAILED`.

 # Safety
 `out` must be writable.
 */
enum KtStatus kt_verify_all(size_t max_k, size_t max_n, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KTOWER_H */
