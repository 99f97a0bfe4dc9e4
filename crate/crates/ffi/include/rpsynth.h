#ifndef RPSYNTH_H
#define RPSYNTH_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RpDialect {
  /**
   * The default dialect of the chosen encoding.
   */
  RP_DIALECT_DEFAULT = 0,
  RP_DIALECT_IN_OUT = 1,
  RP_DIALECT_SEPARATE = 2,
} RpDialect;

typedef enum RpEncoding {
  RP_ENCODING_DIRECT = 0,
  RP_ENCODING_TWO_WAY = 1,
} RpEncoding;

/**
 * Result codes of the C interface.
 */
typedef enum RpStatus {
  RP_STATUS_OK = 0,
  RP_STATUS_NULL_POINTER = 1,
  RP_STATUS_INVALID_UTF8 = 2,
  RP_STATUS_PARSE_ERROR = 3,
  RP_STATUS_CONFIG_ERROR = 4,
  RP_STATUS_UNREALIZABLE = 5,
  RP_STATUS_TIMEOUT = 6,
  RP_STATUS_SOLVER_ERROR = 7,
  RP_STATUS_VERIFICATION_FAILED = 8,
  RP_STATUS_PANIC = 9,
} RpStatus;

/**
 * A program together with its variables.
 */
typedef struct RpProgram RpProgram;

/**
 * A parsed specification.
 */
typedef struct RpSpec RpSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or NULL. Owned by the
 * library and valid until the next call on this thread.
 */
const char *rp_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *rp_version(void);

/**
 * Parses a specification (`inputs: ..; outputs: ..; spec: ..;`).
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RpStatus rp_spec_parse(const char *text, struct RpSpec **out);

/**
 * # Safety
 * `spec` must come from [`rp_spec_parse`] and not be used afterwards.
 */
void rp_spec_free(struct RpSpec *spec);

/**
 * Synthesizes the smallest program with at most `max_nodes` nodes over
 * `num_vars` variables. `timeout_secs <= 0` means no per-step limit.
 * Returns `Unrealizable` or `Timeout` when no program is produced.
 *
 * # Safety
 * `spec` must be a live handle and `out` a valid pointer.
 */
enum RpStatus rp_synthesize(const struct RpSpec *spec,
                            enum RpEncoding encoding,
                            enum RpDialect dialect,
                            size_t num_vars,
                            size_t max_nodes,
                            double timeout_secs,
                            struct RpProgram **out);

/**
 * Parses a program over the signals of `spec`. Identifiers other than the
 * signal names become additional variables.
 *
 * # Safety
 * `spec` must be a live handle, `text` NUL-terminated and `out` valid.
 */
enum RpStatus rp_program_parse(const struct RpSpec *spec,
                               const char *text,
                               enum RpDialect dialect,
                               struct RpProgram **out);

/**
 * Number of nodes of the program tree.
 *
 * # Safety
 * `program` must be a live handle or NULL (which yields 0).
 */
size_t rp_program_nodes(const struct RpProgram *program);

/**
 * The program in concrete syntax; release with [`rp_string_free`].
 *
 * # Safety
 * `program` must be a live handle and `out` a valid pointer.
 */
enum RpStatus rp_program_text(const struct RpProgram *program, char **out);

/**
 * # Safety
 * `program` must come from this library and not be used afterwards.
 */
void rp_program_free(struct RpProgram *program);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void rp_string_free(char *s);

/**
 * Checks `program` against `spec`. `*passed` is set to whether every
 * execution satisfies the specification.
 *
 * # Safety
 * Both handles must be live and `passed` a valid pointer.
 */
enum RpStatus rp_verify(const struct RpSpec *spec, const struct RpProgram *program, bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RPSYNTH_H */
