#ifndef BQC_H
#define BQC_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BqcStatus {
  BQC_STATUS_OK = 0,
  BQC_STATUS_NULL_POINTER = 1,
  BQC_STATUS_INVALID_UTF8 = 2,
  BQC_STATUS_PARSE = 3,
  BQC_STATUS_CONFIG = 4,
  BQC_STATUS_PROTOCOL = 5,
  BQC_STATUS_TRANSPORT = 6,
  BQC_STATUS_BUFFER_TOO_SMALL = 7,
  BQC_STATUS_INTERNAL = 8,
} BqcStatus;

/**
 * A parsed source circuit.
 */
typedef struct BqcCircuit BqcCircuit;

/**
 * A finished session: the decrypted register and Bob's transcript.
 */
typedef struct BqcSession BqcSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *bqc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *bqc_version(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void bqc_string_free(char *s);

/**
 * Parses circuit-file text.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BqcStatus bqc_circuit_parse(const char *text, struct BqcCircuit **out);

/**
 * Number of wires, or 0 for NULL.
 *
 * # Safety
 * `circuit` must be NULL or a live handle.
 */
size_t bqc_circuit_num_wires(const struct BqcCircuit *circuit);

/**
 * Number of gates, or 0 for NULL.
 *
 * # Safety
 * `circuit` must be NULL or a live handle.
 */
size_t bqc_circuit_size(const struct BqcCircuit *circuit);

/**
 * # Safety
 * `circuit` must be NULL or a live handle; it is invalid afterwards.
 */
void bqc_circuit_free(struct BqcCircuit *circuit);

/**
 * Runs an honest in-process session. `protocol` is 1 or 2. `input` holds one
 * of `0 1 + -` per wire, or is NULL for all zeros.
 *
 * # Safety
 * `circuit` must be a live handle, `input` NULL or a NUL-terminated string,
 * and `out` a valid pointer.
 */
enum BqcStatus bqc_session_run(const struct BqcCircuit *circuit,
                               uint8_t protocol,
                               uint64_t alice_seed,
                               uint64_t bob_seed,
                               const char *input,
                               struct BqcSession **out);

/**
 * Fidelity of the decrypted output against direct simulation, or -1 for
 * NULL.
 *
 * # Safety
 * `session` must be NULL or a live handle.
 */
double bqc_session_fidelity(const struct BqcSession *session);

/**
 * Width of the returned register, padding included.
 *
 * # Safety
 * `session` must be NULL or a live handle.
 */
size_t bqc_session_num_wires(const struct BqcSession *session);

/**
 * Writes the `2^wires` basis probabilities of the decrypted register.
 *
 * # Safety
 * `session` must be a live handle and `probs` point at `len` doubles.
 */
enum BqcStatus bqc_session_probabilities(const struct BqcSession *session,
                                         double *probs,
                                         size_t len);

/**
 * Bob's transcript as a JSON array, or NULL for a NULL session. Release
 * with [`bqc_string_free`].
 *
 * # Safety
 * `session` must be NULL or a live handle.
 */
char *bqc_session_transcript_json(const struct BqcSession *session);

/**
 * # Safety
 * `session` must be NULL or a live handle; it is invalid afterwards.
 */
void bqc_session_free(struct BqcSession *session);

/**
 * Trap detection experiment on `circuit` with `traps` extra wires and
 * `reps` repetitions. `policy` uses the CLI names (NULL means
 * `single_random_wire`). `formula` receives the closed-form prediction, or
 * NaN when the policy has none.
 *
 * # Safety
 * `circuit` must be a live handle, `policy` NULL or a NUL-terminated string,
 * and `rate` and `formula` valid pointers.
 */
enum BqcStatus bqc_detection_rate(const struct BqcCircuit *circuit,
                                  uint8_t protocol,
                                  size_t traps,
                                  size_t reps,
                                  const char *policy,
                                  size_t trials,
                                  uint64_t seed,
                                  double *rate,
                                  double *formula);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BQC_H */
