#ifndef TELEPHONE_BROADCAST_H
#define TELEPHONE_BROADCAST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero means success.
 */
typedef enum TbStatus {
  TB_STATUS_OK = 0,
  TB_STATUS_NULL_POINTER = 1,
  TB_STATUS_INVALID_UTF8 = 2,
  TB_STATUS_PARSE_ERROR = 3,
  TB_STATUS_INVALID_PROTOCOL = 4,
  TB_STATUS_SOLVE_ERROR = 5,
  TB_STATUS_REDUCTION_ERROR = 6,
  TB_STATUS_PANIC = 7,
} TbStatus;

/**
 * A broadcast instance: graph, source and deadline.
 */
typedef struct TbInstance TbInstance;

/**
 * A broadcast protocol for some instance.
 */
typedef struct TbProtocol TbProtocol;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL after a
 * success. The pointer stays valid until the next call on this thread.
 */
const char *tb_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void tb_string_free(char *s);

/**
 * Parses an instance in the `tb n m s t` text format.
 *
 * # Safety
 * `src` must be a NUL-terminated string; `out` must be writable.
 */
enum TbStatus tb_instance_parse(const char *src, struct TbInstance **out);

/**
 * Renders an instance back to text. Returns NULL on a NULL handle.
 *
 * # Safety
 * `inst` must be NULL or a live handle.
 */
char *tb_instance_render(const struct TbInstance *inst);

/**
 * Vertex count, or 0 for NULL.
 *
 * # Safety
 * `inst` must be NULL or a live handle.
 */
size_t tb_instance_order(const struct TbInstance *inst);

/**
 * Source vertex (1-based), or 0 for NULL.
 *
 * # Safety
 * `inst` must be NULL or a live handle.
 */
size_t tb_instance_source(const struct TbInstance *inst);

/**
 * Deadline, or 0 for NULL.
 *
 * # Safety
 * `inst` must be NULL or a live handle.
 */
size_t tb_instance_deadline(const struct TbInstance *inst);

/**
 * # Safety
 * `inst` must be NULL or a handle not yet freed.
 */
void tb_instance_free(struct TbInstance *inst);

/**
 * Parses a protocol (child lists) for `inst`.
 *
 * # Safety
 * `src` must be a NUL-terminated string, `inst` a live handle and `out`
 * writable.
 */
enum TbStatus tb_protocol_parse(const struct TbInstance *inst,
                                const char *src,
                                struct TbProtocol **out);

/**
 * Renders a protocol to text. Returns NULL on a NULL handle.
 *
 * # Safety
 * `p` must be NULL or a live handle.
 */
char *tb_protocol_render(const struct TbProtocol *p);

/**
 * # Safety
 * `p` must be NULL or a handle not yet freed.
 */
void tb_protocol_free(struct TbProtocol *p);

/**
 * Checks `p` against `inst`. A protocol that runs but misses the deadline
 * yields `TB_OK` with `*valid == false`; one that is not a spanning tree
 * of the graph yields `InvalidProtocol`. `completion` may be NULL.
 *
 * # Safety
 * Handles must be live; `valid` must be writable.
 */
enum TbStatus tb_verify(const struct TbInstance *inst,
                        const struct TbProtocol *p,
                        bool *valid,
                        size_t *completion);

/**
 * Decides whether `inst` can be broadcast within its deadline. On YES and
 * a non-NULL `protocol`, a verifying protocol handle is stored there;
 * otherwise `*protocol` is set to NULL.
 *
 * # Safety
 * `inst` must be live; `yes` writable; `protocol` NULL or writable.
 */
enum TbStatus tb_decide(const struct TbInstance *inst,
                        uint64_t budget,
                        bool *yes,
                        struct TbProtocol **protocol);

/**
 * Minimum broadcast time of `inst` (its deadline is ignored). `protocol`
 * may be NULL; otherwise an optimal protocol handle is stored there.
 *
 * # Safety
 * `inst` must be live; `time` writable; `protocol` NULL or writable.
 */
enum TbStatus tb_solve(const struct TbInstance *inst,
                       uint64_t budget,
                       size_t *time,
                       struct TbProtocol **protocol);

/**
 * Builds the broadcast instance encoding a DIMACS CNF formula. Formulas
 * that do not already fit the gadget are normalized first when
 * `normalize_input` is true and rejected otherwise.
 *
 * # Safety
 * `dimacs` must be a NUL-terminated string; `out` writable.
 */
enum TbStatus tb_reduce_sat(const char *dimacs, bool normalize_input, struct TbInstance **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TELEPHONE_BROADCAST_H */
