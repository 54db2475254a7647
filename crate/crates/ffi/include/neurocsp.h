#ifndef NEUROCSP_H
#define NEUROCSP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NcspStatus {
  NCSP_STATUS_OK = 0,
  NCSP_STATUS_NULL_POINTER = 1,
  NCSP_STATUS_INVALID_UTF8 = 2,
  NCSP_STATUS_PARSE_ERROR = 3,
  NCSP_STATUS_COMPILE_ERROR = 4,
  NCSP_STATUS_INVALID_ARGUMENT = 5,
  NCSP_STATUS_OUT_OF_RANGE = 6,
  NCSP_STATUS_PANIC = 7,
} NcspStatus;

/**
 * A validated constraint satisfaction problem.
 */
typedef struct NcspCsp NcspCsp;

/**
 * A network compiled from one `NcspCsp`.
 */
typedef struct NcspNetwork NcspNetwork;

/**
 * Outcome of one sampler run.
 */
typedef struct NcspRunResult NcspRunResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread; empty after success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *ncsp_last_error_message(void);

/**
 * Builds a problem from an inline spec (`k3`, `ring:10:antiferro`, ...) or a file path.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be writable.
 */
enum NcspStatus ncsp_csp_from_spec(const char *spec, struct NcspCsp **out);

/**
 * Parses DIMACS CNF text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum NcspStatus ncsp_csp_from_dimacs(const char *text, struct NcspCsp **out);

/**
 * # Safety
 * `csp` must come from this library; `out` must be writable.
 */
enum NcspStatus ncsp_csp_num_vars(const struct NcspCsp *csp, size_t *out);

/**
 * Checks a complete assignment given as one value index per variable.
 *
 * # Safety
 * `values` must point to `len` readable elements; `satisfied` must be writable.
 */
enum NcspStatus ncsp_csp_check(const struct NcspCsp *csp,
                               const size_t *values,
                               size_t len,
                               bool *satisfied);

/**
 * # Safety
 * `csp` must come from this library (or be null) and not be used afterwards.
 */
void ncsp_csp_free(struct NcspCsp *csp);

/**
 * Compiles a problem. Non-positive `w_max` or `or_strength` is rejected.
 *
 * # Safety
 * `csp` must come from this library; `out` must be writable.
 */
enum NcspStatus ncsp_network_compile(const struct NcspCsp *csp,
                                     double w_max,
                                     double bias,
                                     double or_strength,
                                     bool heuristic,
                                     struct NcspNetwork **out);

/**
 * # Safety
 * `net` must come from this library; output pointers must be writable.
 */
enum NcspStatus ncsp_network_size(const struct NcspNetwork *net,
                                  size_t *n_principal,
                                  size_t *n_total);

/**
 * Energy of a binary state (`len` must equal the neuron count; nonzero bytes are active).
 *
 * # Safety
 * `x` must point to `len` readable bytes; `out` must be writable.
 */
enum NcspStatus ncsp_network_energy(const struct NcspNetwork *net,
                                    const uint8_t *x,
                                    size_t len,
                                    double *out);

/**
 * # Safety
 * `net` must come from this library (or be null) and not be used afterwards.
 */
void ncsp_network_free(struct NcspNetwork *net);

/**
 * Runs the sampler. With `stop_at_first` the run ends at the first solution
 * event; otherwise it uses the full `max_sweeps` budget. An unsolved run is
 * not an error.
 *
 * # Safety
 * `csp` and `net` must come from this library, `net` compiled from `csp`;
 * `out` must be writable.
 */
enum NcspStatus ncsp_run(const struct NcspCsp *csp,
                         const struct NcspNetwork *net,
                         uint32_t tau,
                         uint64_t max_sweeps,
                         uint64_t seed,
                         bool stop_at_first,
                         struct NcspRunResult **out);

/**
 * # Safety
 * `result` must come from this library; output pointers must be writable.
 * `first_sweep` is set to 0 when unsolved.
 */
enum NcspStatus ncsp_run_result_summary(const struct NcspRunResult *result,
                                        bool *solved,
                                        uint64_t *first_sweep,
                                        size_t *n_solutions);

/**
 * Copies solution `index` (one value index per variable) into `values`,
 * which must have room for `len >= num_vars` entries.
 *
 * # Safety
 * `values` must point to `len` writable elements.
 */
enum NcspStatus ncsp_run_result_solution(const struct NcspRunResult *result,
                                         size_t index,
                                         size_t *values,
                                         size_t len);

/**
 * # Safety
 * `result` must come from this library (or be null) and not be used afterwards.
 */
void ncsp_run_result_free(struct NcspRunResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NEUROCSP_H */
