/* C ABI for the vpsim vector-perturbation SWIPT simulator. */

#ifndef VPSIM_H
#define VPSIM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every C-ABI entry point.
typedef enum VpsimStatus {
  VpsimStatus_Ok = 0,
  VpsimStatus_NullPointer = 1,
  VpsimStatus_InvalidUtf8 = 2,
  VpsimStatus_InvalidConfig = 3,
  VpsimStatus_InvalidInput = 4,
  VpsimStatus_SingularChannel = 5,
  VpsimStatus_DegenerateLattice = 6,
  VpsimStatus_BudgetExceeded = 7,
  VpsimStatus_QuadratureFailure = 8,
  VpsimStatus_NumericalInstability = 9,
  VpsimStatus_IoError = 10,
  VpsimStatus_JsonError = 11,
  VpsimStatus_Panic = 12,
} VpsimStatus;

// Opaque simulation configuration handle.
typedef struct VpsimConfig VpsimConfig;

// Opaque sweep result handle.
typedef struct VpsimResult VpsimResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent error on this thread. The pointer is
// owned by the library and valid until the next failing call on the same
// thread; do not free it.
const char *vpsim_last_error_message(void);

// Parses a JSON configuration (same schema as the CLI `--config` file;
// missing fields take their defaults) into a new handle.
//
// # Safety
// `json` must be a valid NUL-terminated string and `out` a valid pointer.
enum VpsimStatus vpsim_config_from_json(const char *json, struct VpsimConfig **out);

// Default configuration handle.
//
// # Safety
// `out` must be a valid pointer.
enum VpsimStatus vpsim_config_default(struct VpsimConfig **out);

// Serializes a configuration handle back to JSON.
//
// # Safety
// `cfg` must be a live handle from this library, `out` a valid pointer.
enum VpsimStatus vpsim_config_to_json(const struct VpsimConfig *cfg, char **out);

// Releases a configuration handle. Passing NULL is a no-op.
//
// # Safety
// `cfg` must be NULL or a handle from this library, not yet freed.
void vpsim_config_free(struct VpsimConfig *cfg);

// Runs a Monte Carlo sweep over the configured power grid.
//
// # Safety
// `cfg` must be a live handle, `out` a valid pointer.
enum VpsimStatus vpsim_run_sweep(const struct VpsimConfig *cfg, struct VpsimResult **out);

// Runs a sweep over the VP-SWIPT blend parameter at fixed power.
//
// # Safety
// `cfg` must be a live handle, `out` a valid pointer.
enum VpsimStatus vpsim_run_eta_sweep(const struct VpsimConfig *cfg, struct VpsimResult **out);

// Renders a result as CSV (fixed column schema).
//
// # Safety
// `result` must be a live handle, `out` a valid pointer.
enum VpsimStatus vpsim_result_to_csv(const struct VpsimResult *result, char **out);

// Renders a result as JSON with the config echo.
//
// # Safety
// `result` must be a live handle, `out` a valid pointer.
enum VpsimStatus vpsim_result_to_json(const struct VpsimResult *result, char **out);

// Releases a result handle. Passing NULL is a no-op.
//
// # Safety
// `result` must be NULL or a handle from this library, not yet freed.
void vpsim_result_free(struct VpsimResult *result);

// Releases a string returned by this library. Passing NULL is a no-op.
//
// # Safety
// `s` must be NULL or a string returned by this library, not yet freed.
void vpsim_string_free(char *s);

// Closed-form lower bound on the expected VP power scaling factor.
//
// # Safety
// `out` must be a valid pointer.
enum VpsimStatus vpsim_egamma_lower_bound(uint32_t m, uint32_t k, double tau, double *out);

// CDF of the largest eigenvalue of a complex Wishart matrix.
//
// # Safety
// `out` must be a valid pointer.
enum VpsimStatus vpsim_wishart_max_eig_cdf(double x, uint32_t m, uint32_t k, double *out);

// Predicted per-user harvested power of the VP-EH scheme.
//
// # Safety
// `out` must be a valid pointer.
enum VpsimStatus vpsim_eeh_theory(double p, uint32_t m, uint32_t k, double *out);

// Outage probability of the VP-EH equivalent channel.
//
// # Safety
// `out` must be a valid pointer.
enum VpsimStatus vpsim_outage_probability(double p,
                                          double r_bits,
                                          uint32_t m,
                                          uint32_t k,
                                          double c_mag2,
                                          double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VPSIM_H */
