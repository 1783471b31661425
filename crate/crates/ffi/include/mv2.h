#ifndef MV2_H
#define MV2_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdint.h>
#include <stddef.h>

typedef enum Mv2Status {
  MV2_STATUS_OK = 0,
  MV2_STATUS_NULL_POINTER = 1,
  MV2_STATUS_INVALID_ARGUMENT = 2,
  MV2_STATUS_UNSUPPORTED_WIDTH = 3,
  MV2_STATUS_CAPACITY = 4,
  MV2_STATUS_CORRUPT = 5,
  MV2_STATUS_TRUNCATED = 6,
  MV2_STATUS_CHECKSUM_MISMATCH = 7,
  MV2_STATUS_BAD_MAGIC = 8,
  MV2_STATUS_UNSUPPORTED_VERSION = 9,
  MV2_STATUS_DEGENERATE_RATIO = 10,
  MV2_STATUS_OVERFLOW = 11,
  MV2_STATUS_NOT_FOUND = 12,
  MV2_STATUS_PANIC = 13,
} Mv2Status;

/**
 * Opaque handle to a shortest-first codebook.
 */
typedef struct Mv2Codebook Mv2Codebook;

/**
 * Opaque handle to a parsed container.
 */
typedef struct Mv2Container Mv2Container;

/**
 * Pipeline parameters. `input_format`: 0 = bytes, 1 = digits.
 */
typedef struct Mv2Params {
  uint16_t radix;
  uint16_t width;
  uint8_t clone_id;
  uint8_t rounds;
  uint8_t input_format;
} Mv2Params;

/**
 * Library-owned bytes; release with [`mv2_buffer_free`].
 */
typedef struct Mv2Buffer {
  uint8_t *data;
  size_t len;
} Mv2Buffer;

/**
 * Summary of a parsed container.
 */
typedef struct Mv2ContainerInfo {
  uint16_t radix;
  uint16_t width;
  uint8_t clone_id;
  uint8_t rounds;
  uint8_t input_format;
  uint64_t original_pit_count;
  uint64_t remainder_pits;
  uint64_t total_pits;
} Mv2ContainerInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *mv2_last_error(void);

/**
 * Static NUL-terminated version string.
 */
const char *mv2_version(void);

/**
 * Encodes `input` into a serialized container written to `out`.
 *
 * # Safety
 * `input` must point to `len` readable bytes (or be null when `len == 0`);
 * `params` and `out` must be valid pointers.
 */
enum Mv2Status mv2_encode(const uint8_t *input,
                          size_t len,
                          const struct Mv2Params *params,
                          struct Mv2Buffer *out);

/**
 * Decodes a serialized container back into the original file bytes.
 *
 * # Safety
 * `data` must point to `len` readable bytes; `out` must be a valid pointer.
 */
enum Mv2Status mv2_decode(const uint8_t *data, size_t len, struct Mv2Buffer *out);

/**
 * Releases a buffer filled by this library and resets it to empty.
 *
 * # Safety
 * `buf` must be null or point to a buffer filled by this library and not yet freed.
 */
void mv2_buffer_free(struct Mv2Buffer *buf);

/**
 * Parses and checksums a container.
 *
 * # Safety
 * `data` must point to `len` readable bytes; `out` must be a valid pointer.
 */
enum Mv2Status mv2_container_parse(const uint8_t *data, size_t len, struct Mv2Container **out);

/**
 * # Safety
 * `container` must come from [`mv2_container_parse`]; `out` must be valid.
 */
enum Mv2Status mv2_container_info(const struct Mv2Container *container,
                                  struct Mv2ContainerInfo *out);

/**
 * # Safety
 * `container` must be null or come from [`mv2_container_parse`] and not yet be freed.
 */
void mv2_container_free(struct Mv2Container *container);

/**
 * Builds the shortest-first codebook for `(radix, width)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum Mv2Status mv2_codebook_new(uint16_t radix, uint16_t width, struct Mv2Codebook **out);

/**
 * # Safety
 * `book` must be null or come from [`mv2_codebook_new`] and not yet be freed.
 */
void mv2_codebook_free(struct Mv2Codebook *book);

/**
 * Code length and code value for element `value`.
 *
 * # Safety
 * All pointers must be valid; `book` must come from [`mv2_codebook_new`].
 */
enum Mv2Status mv2_codebook_forward(const struct Mv2Codebook *book,
                                    uint64_t value,
                                    uint32_t *code_len,
                                    uint64_t *code);

/**
 * Element for a `(code_len, code)` pair.
 *
 * # Safety
 * All pointers must be valid; `book` must come from [`mv2_codebook_new`].
 */
enum Mv2Status mv2_codebook_inverse(const struct Mv2Codebook *book,
                                    uint32_t code_len,
                                    uint64_t code,
                                    uint64_t *value);

/**
 * Writes up to `cap` per-length code counts (index 0 is length 1) and
 * returns the number of lengths in use. Returns 0 for a null handle.
 *
 * # Safety
 * `book` must come from [`mv2_codebook_new`]; `counts` must hold `cap`
 * writable elements (or be null when `cap == 0`).
 */
size_t mv2_codebook_histogram(const struct Mv2Codebook *book, uint64_t *counts, size_t cap);

/**
 * Closed-form main-file ratio of a clone as `numer / denom`.
 * Fails with `Overflow` when either part exceeds 64 bits.
 *
 * # Safety
 * `numer` and `denom` must be valid pointers.
 */
enum Mv2Status mv2_ratio(uint8_t clone_id,
                         uint16_t radix,
                         uint16_t width,
                         uint64_t *numer,
                         uint64_t *denom);

/**
 * Runs the main-file verification and returns the JSON report in `out_json`
 * (release with [`mv2_string_free`]). `regressions` receives the number of
 * regressions found; zero means every entry matched or is a known erratum.
 *
 * # Safety
 * `out_json` and `regressions` must be valid pointers.
 */
enum Mv2Status mv2_verify_json(uint16_t radix,
                               uint16_t width,
                               char **out_json,
                               uint32_t *regressions);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void mv2_string_free(char *s);

/**
 * Length of a NUL-terminated string returned by this library, for callers
 * without `strlen`.
 *
 * # Safety
 * `s` must be a valid NUL-terminated string.
 */
size_t mv2_string_len(const char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MV2_H */
