#ifndef STEGONET_H
#define STEGONET_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum StegonetStatus {
  STEGONET_STATUS_OK = 0,
  STEGONET_STATUS_NULL_POINTER = 1,
  STEGONET_STATUS_INVALID_ARGUMENT = 2,
  STEGONET_STATUS_SHAPE = 3,
  STEGONET_STATUS_CAPACITY = 4,
  STEGONET_STATUS_PARSE = 5,
  STEGONET_STATUS_IO = 6,
  STEGONET_STATUS_DIVERGED = 7,
  STEGONET_STATUS_UNSUPPORTED = 8,
  /**
   * Training finished but the network is not exact.
   */
  STEGONET_STATUS_NOT_EXACT = 9,
  STEGONET_STATUS_PANIC = 10,
} StegonetStatus;

/**
 * Trained or loaded network.
 */
typedef struct StegonetModel StegonetModel;

/**
 * Byte buffer owned by the library.
 */
typedef struct StegonetBuffer {
  uint8_t *data;
  size_t len;
} StegonetBuffer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *stegonet_last_error_message(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library.
 */
void stegonet_string_free(char *s);

/**
 * # Safety
 * `buf` must be NULL or point to a buffer filled by this library.
 */
void stegonet_buffer_free(struct StegonetBuffer *buf);

uint32_t stegonet_lsb_embed(uint32_t x, uint8_t m);

uint8_t stegonet_lsb_extract(uint32_t y);

/**
 * Syndrome of `n = 2^k - 1` cover bits.
 *
 * # Safety
 * `x` must point to `n` bytes and `out` to a writable `size_t`.
 */
enum StegonetStatus stegonet_mc_syndrome(uint32_t k, const uint8_t *x, size_t n, size_t *out);

/**
 * Embeds `k` message bits into `n = 2^k - 1` cover bits, writing `n` bits.
 *
 * # Safety
 * `x` and `y` must hold `n` bytes, `m` must hold `k` bytes.
 */
enum StegonetStatus stegonet_mc_embed(uint32_t k,
                                      const uint8_t *x,
                                      size_t n,
                                      const uint8_t *m,
                                      size_t m_len,
                                      uint8_t *y);

/**
 * Extracts `k` message bits from `n = 2^k - 1` stego bits.
 *
 * # Safety
 * `y` must hold `n` bytes and `m` must have room for `k` bytes.
 */
enum StegonetStatus stegonet_mc_extract(uint32_t k, const uint8_t *y, size_t n, uint8_t *m);

/**
 * Parses a model from its text form.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` writable.
 */
enum StegonetStatus stegonet_model_from_text(const char *text, struct StegonetModel **out);

/**
 * Loads a model file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum StegonetStatus stegonet_model_load(const char *path, struct StegonetModel **out);

/**
 * Runs a named preset (`appendixA`, `appendixB`, `appendixC`, `fig2`) and
 * returns its model. The model is stored even when training did not reach
 * an exact network; the status is then `NotExact`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` writable.
 */
enum StegonetStatus stegonet_train_preset(const char *name,
                                          uint64_t seed,
                                          struct StegonetModel **out);

/**
 * # Safety
 * `model` must be NULL or a handle from this library, freed at most once.
 */
void stegonet_model_free(struct StegonetModel *model);

/**
 * # Safety
 * `model` must be a live handle.
 */
size_t stegonet_model_input_arity(const struct StegonetModel *model);

/**
 * # Safety
 * `model` must be a live handle.
 */
size_t stegonet_model_output_arity(const struct StegonetModel *model);

/**
 * Raw (unthresholded) outputs for one input vector.
 *
 * # Safety
 * `input` must hold `input_len` doubles and `output` `output_len` doubles.
 */
enum StegonetStatus stegonet_model_forward(const struct StegonetModel *model,
                                           const double *input,
                                           size_t input_len,
                                           double *output,
                                           size_t output_len);

/**
 * Text form of the model; free with [`stegonet_string_free`].
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum StegonetStatus stegonet_model_to_text(const struct StegonetModel *model, char **out);

/**
 * Exhaustive error rate of the thresholded model against `task` (for
 * example `lsb:3` or `matrix-c`).
 *
 * # Safety
 * `model` must be a live handle, `task` a NUL-terminated string and `rate`
 * writable.
 */
enum StegonetStatus stegonet_model_error_rate(const struct StegonetModel *model,
                                              const char *task,
                                              double *rate);

/**
 * Embeds message bits into a binary PGM with `lsb` or `matrix:K`, writing the
 * stego PGM to `out`.
 *
 * # Safety
 * `pgm` must hold `pgm_len` bytes, `message` `message_len` bytes of 0 or 1,
 * `scheme` must be NUL-terminated and `out` writable.
 */
enum StegonetStatus stegonet_embed_pgm(const uint8_t *pgm,
                                       size_t pgm_len,
                                       const char *scheme,
                                       const uint8_t *message,
                                       size_t message_len,
                                       struct StegonetBuffer *out);

/**
 * Extracts `message_len` bits from a stego PGM into `message`.
 *
 * # Safety
 * `pgm` must hold `pgm_len` bytes, `scheme` must be NUL-terminated and
 * `message` must have room for `message_len` bytes.
 */
enum StegonetStatus stegonet_extract_pgm(const uint8_t *pgm,
                                         size_t pgm_len,
                                         const char *scheme,
                                         uint8_t *message,
                                         size_t message_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STEGONET_H */
