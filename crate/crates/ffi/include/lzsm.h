#ifndef LZSM_H
#define LZSM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum LzsmStatus {
  LZSM_STATUS_OK = 0,
  LZSM_STATUS_NULL_POINTER = 1,
  LZSM_STATUS_INVALID_ARGUMENT = 2,
  LZSM_STATUS_INVALID_CONFIG = 3,
  LZSM_STATUS_PARSE = 4,
  LZSM_STATUS_UNSUPPORTED_CONFIG = 5,
  LZSM_STATUS_OFF_RESONANCE = 6,
  LZSM_STATUS_DOMAIN = 7,
  LZSM_STATUS_ACCURACY = 8,
  LZSM_STATUS_INTEGRATION_FAILURE = 9,
  LZSM_STATUS_IO = 10,
  LZSM_STATUS_PANIC = 11,
} LzsmStatus;

/**
 * Drive configuration (dimensionless, sweep velocity 1 unless zero-sweep).
 */
typedef struct LzsmConfig LzsmConfig;

/**
 * Sampled solution of the Schrödinger equation.
 */
typedef struct LzsmTrajectory LzsmTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t lzsm_last_error_message(char *buf, size_t len);

/**
 * New configuration with `v = 1` and every drive off.
 */
struct LzsmConfig *lzsm_config_new(void);

/**
 * Parse a `key = value` or JSON config (physical units are rescaled).
 *
 * # Safety
 * `src` must be a NUL-terminated string; `out_config` must be writable.
 */
enum LzsmStatus lzsm_config_parse(const char *src, struct LzsmConfig **out_config);

/**
 * # Safety
 * `config` must come from this library and not be used afterwards.
 */
void lzsm_config_free(struct LzsmConfig *config);

/**
 * Set a field by name (`v`, `delta`, `eps0`, `amp_rf`, `freq_rf`, `amp_mw`,
 * `freq_mw`, `phase`). The value is taken as dimensionless.
 *
 * # Safety
 * `config` must be a live handle and `name` a NUL-terminated string.
 */
enum LzsmStatus lzsm_config_set(struct LzsmConfig *config, const char *name, double value);

/**
 * # Safety
 * `config` must be a live handle, `name` a NUL-terminated string and
 * `value` writable.
 */
enum LzsmStatus lzsm_config_get(const struct LzsmConfig *config, const char *name, double *value);

/**
 * Survival probability `exp(-2 pi delta)` at multiphoton resonance.
 *
 * # Safety
 * `config` must be a live handle and `p_up` writable.
 */
enum LzsmStatus lzsm_strong_drive_survival(const struct LzsmConfig *config, double *p_up);

/**
 * Final populations of the weak-drive single passage.
 *
 * # Safety
 * `config` must be a live handle; `p_up` and `p_dn` writable.
 */
enum LzsmStatus lzsm_weak_drive_probabilities(const struct LzsmConfig *config,
                                              double *p_up,
                                              double *p_dn);

/**
 * Perturbative Bloch vector at `tau`; `n_max = 0` picks the default cutoff.
 *
 * # Safety
 * `config` must be a live handle and `u` must point to 3 writable doubles.
 */
enum LzsmStatus lzsm_bloch_perturbative(const struct LzsmConfig *config,
                                        double tau,
                                        uint32_t n_max,
                                        double *u);

/**
 * Integrate from spin up at `tau_start` to `tau_end`, sampling every `stride`.
 *
 * # Safety
 * `config` must be a live handle and `out_trajectory` writable.
 */
enum LzsmStatus lzsm_trajectory_new(const struct LzsmConfig *config,
                                    double tau_start,
                                    double tau_end,
                                    double tol,
                                    double stride,
                                    struct LzsmTrajectory **out_trajectory);

/**
 * Number of samples, or 0 for a null handle.
 *
 * # Safety
 * `trajectory` must be null or a live handle.
 */
size_t lzsm_trajectory_len(const struct LzsmTrajectory *trajectory);

/**
 * Sample `index` as `[tau, p_up, p_dn, ux, uy, uz]`.
 *
 * # Safety
 * `trajectory` must be a live handle and `row` must point to 6 writable doubles.
 */
enum LzsmStatus lzsm_trajectory_sample(const struct LzsmTrajectory *trajectory,
                                       size_t index,
                                       double *row);

/**
 * # Safety
 * `trajectory` must come from this library and not be used afterwards.
 */
void lzsm_trajectory_free(struct LzsmTrajectory *trajectory);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LZSM_H */
