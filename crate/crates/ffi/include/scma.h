#ifndef SCMA_H
#define SCMA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

#define SCMA_DETECTOR_MPA 0

#define SCMA_DETECTOR_EPA 1

#define SCMA_RECEIVER_MMSE_SIC 0

#define SCMA_RECEIVER_MPA 1

#define SCMA_RECEIVER_SIC_MPA 2

#define SCMA_RECEIVER_EPA 3

typedef enum ScmaStatus {
  SCMA_STATUS_OK = 0,
  SCMA_STATUS_NULL_POINTER = 1,
  SCMA_STATUS_INVALID_ARGUMENT = 2,
  SCMA_STATUS_IO = 3,
  SCMA_STATUS_PARSE = 4,
  SCMA_STATUS_INVALID_CODEBOOK = 5,
  SCMA_STATUS_DIMENSION = 6,
  SCMA_STATUS_OVERFLOW = 7,
  SCMA_STATUS_PANIC = 8,
} ScmaStatus;

/**
 * Opaque codebook handle.
 */
typedef struct ScmaCodebook ScmaCodebook;

/**
 * Detector selection for `scma_decode`.
 */
typedef struct ScmaDecodeOptions {
  /**
   * `SCMA_DETECTOR_MPA` or `SCMA_DETECTOR_EPA`.
   */
  uint32_t detector;
  /**
   * Inner iterations, at least 1.
   */
  uint32_t iterations;
  /**
   * EPA damping in (0, 1]; ignored by MPA.
   */
  double damping;
} ScmaDecodeOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or an empty string.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *scma_last_error_message(void);

/**
 * Builds the generated regular codebook.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum ScmaStatus scma_codebook_default(size_t users,
                                      size_t resources,
                                      size_t size,
                                      size_t degree,
                                      struct ScmaCodebook **out);

/**
 * Loads a codebook JSON file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` valid for a pointer write.
 */
enum ScmaStatus scma_codebook_load(const char *path, struct ScmaCodebook **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `cb` must come from this library and not have been freed.
 */
void scma_codebook_free(struct ScmaCodebook *cb);

/**
 * Writes K, N and M. Any output pointer may be null.
 *
 * # Safety
 * `cb` must be a live handle; non-null outputs must be writable.
 */
enum ScmaStatus scma_codebook_dims(const struct ScmaCodebook *cb,
                                   size_t *users,
                                   size_t *resources,
                                   size_t *size);

/**
 * Maps `log2(M)` bits (0 or 1, most significant first) of one user to its
 * N-dimensional codeword, written as `2 * N` interleaved doubles.
 *
 * # Safety
 * `bits` must hold `n_bits` bytes and `out` `out_len` doubles.
 */
enum ScmaStatus scma_encode(const struct ScmaCodebook *cb,
                            size_t user,
                            const uint8_t *bits,
                            size_t n_bits,
                            double *out,
                            size_t out_len);

/**
 * Default options: EPA, three inner iterations, no damping.
 */
struct ScmaDecodeOptions scma_decode_options_default(void);

/**
 * Detects one block and writes posterior LLRs, user-major, `K * log2(M)`
 * values. Positive LLRs favour bit 1.
 *
 * `y` holds `antennas * N` complex samples `[antenna][resource]`; `gains`
 * holds `antennas * K * N` complex gains `[antenna][user][resource]`.
 * `prior_llrs` may be null for uniform priors, otherwise `K * log2(M)`
 * values.
 *
 * # Safety
 * Every non-null pointer must reference the number of elements stated.
 */
enum ScmaStatus scma_decode(const struct ScmaCodebook *cb,
                            const struct ScmaDecodeOptions *options,
                            size_t antennas,
                            const double *y,
                            const double *gains,
                            double noise_var,
                            const double *prior_llrs,
                            double *llr_out,
                            size_t llr_len);

/**
 * Dominant-term complexity order of one receiver type (one of the
 * `SCMA_RECEIVER_*` constants). Fails with `Overflow` when the order does
 * not fit 64 bits.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum ScmaStatus scma_complexity_order(uint32_t receiver,
                                      uint32_t n_r,
                                      uint32_t n,
                                      uint32_t k,
                                      uint32_t n_iter,
                                      uint32_t m,
                                      uint32_t m_p,
                                      uint32_t d_f,
                                      uint32_t d_s,
                                      uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCMA_H */
