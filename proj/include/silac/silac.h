/* SPDX-License-Identifier: Apache-2.0
 *
 * silac - sparse-array integrated localization and communication toolkit.
 *
 * C interface of the shared library. All functions return a silac_status
 * (SILAC_OK on success); a human-readable message for the last failure on
 * the calling thread is available from silac_last_error(). Objects are
 * exposed as opaque handles with explicit destroy functions. Strings
 * returned through char** are heap-allocated and must be released with
 * silac_string_free().
 */
#ifndef SILAC_H
#define SILAC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define SILAC_VERSION_MAJOR 1
#define SILAC_VERSION_MINOR 0
#define SILAC_VERSION_PATCH 0

typedef enum silac_status {
  SILAC_OK = 0,
  SILAC_ERR_INVALID_ARGUMENT = 1,
  SILAC_ERR_INVALID_HANDLE = 2,
  SILAC_ERR_NUMERIC = 3,
  SILAC_ERR_IO = 4,
  SILAC_ERR_INTERNAL = 5
} silac_status;

/* Library version as "major.minor.patch". */
const char* silac_version(void);

/* Message of the last error raised on this thread ("" when none). */
const char* silac_last_error(void);

void silac_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Array geometries                                                    */
/* ------------------------------------------------------------------ */

typedef struct silac_geometry silac_geometry;

/* arch: "ula" (params = {M}), "nested" (params = {N1, N2}) or
 * "coprime" (params = {M1, M2}). */
silac_status silac_geometry_create(const char* arch, const int* params,
                                   size_t n_params, silac_geometry** out);
void silac_geometry_free(silac_geometry* g);

silac_status silac_geometry_element_count(const silac_geometry* g, int* out);
silac_status silac_geometry_aperture(const silac_geometry* g, int* out);

/* Copies the integer grid positions; *out_count receives the element count.
 * Returns SILAC_ERR_INVALID_ARGUMENT when capacity is too small. */
silac_status silac_geometry_positions(const silac_geometry* g, int* buffer,
                                      size_t capacity, size_t* out_count);

/* {"arch": ..., "params": [...], "positions": [...]} */
silac_status silac_geometry_json(const silac_geometry* g, char** out_json);

/* Steering vector at theta (radians), interleaved re/im, 2*M doubles. */
silac_status silac_steering(const silac_geometry* g, double theta_rad,
                            double* interleaved, size_t capacity);

/* ------------------------------------------------------------------ */
/* Beam patterns                                                       */
/* ------------------------------------------------------------------ */

/* Normalized beam pattern at spatial angle delta = sin(a) - sin(b). */
silac_status silac_gain(const silac_geometry* g, double delta, double* out);

/* Closed-form beam pattern of the geometry's architecture. */
silac_status silac_closed_form_gain(const silac_geometry* g, double delta,
                                    double* out);

/* First local minimum point of the beam pattern (grid_step 0 = automatic). */
silac_status silac_find_flmp(const silac_geometry* g, double grid_step,
                             double* out);

/* Full metrics block: {flmp, bw, plmr, plmr_bound{...}, slh[],
 * bounds{lower, upper, branch}, thresholds{...}}. */
silac_status silac_beam_metrics_json(const silac_geometry* g, double grid_step,
                                     char** out_json);

/* ------------------------------------------------------------------ */
/* Difference co-arrays                                                */
/* ------------------------------------------------------------------ */

typedef struct silac_coarray silac_coarray;

silac_status silac_coarray_create(const silac_geometry* g, silac_coarray** out);
void silac_coarray_free(silac_coarray* c);

silac_status silac_coarray_sizes(const silac_coarray* c, int* m_vir, int* m_svir);

/* {"lags": [...], "weights": [...], "holes": [...], "m_vir", "m_svir"} */
silac_status silac_coarray_json(const silac_coarray* c, char** out_json);

/* Type I interference pattern of the (selected) virtual array. */
silac_status silac_type1_pattern(const silac_coarray* c, double delta,
                                 int selected, double* out);

/* Type II interference pattern; needs the geometry the co-array came from. */
silac_status silac_type2_pattern(const silac_geometry* g, const silac_coarray* c,
                                 double delta_ki, double delta_kj, int selected,
                                 double* out);

/* ------------------------------------------------------------------ */
/* Virtual-array SNR                                                   */
/* ------------------------------------------------------------------ */

/* Closed form: snr_phy = M*rho, snr_vir = 2M^2rho^2/(2Mrho + (M+1)/M). */
silac_status silac_virtual_snr_closed(int m, double rho, double* snr_vir,
                                      double* snr_phy);

/* Monte Carlo estimate of the virtual-array SNR (sigma^2 = 1). */
silac_status silac_virtual_snr_mc(const silac_geometry* g, double rho,
                                  long long trials, uint64_t seed,
                                  double* out_snr);

/* ------------------------------------------------------------------ */
/* Experiments                                                         */
/* ------------------------------------------------------------------ */

/* Runs the experiment described by a JSON configuration (see the README for
 * the schema), writes result files into the configured output directory and
 * returns the result document. */
silac_status silac_run_experiment(const char* config_json, char** out_json);

/* AoA estimation on a scenario JSON. estimator: "bartlett",
 * "bartlett-smoothed", "music" or "bartlett-physical". out_dir may be NULL
 * (no files written). */
silac_status silac_localize(const char* scenario_json, const char* estimator,
                            double grid_step_rad, const char* out_dir,
                            char** out_report_json);

#ifdef __cplusplus
}
#endif

#endif /* SILAC_H */
