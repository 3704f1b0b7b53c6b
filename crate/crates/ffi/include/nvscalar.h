/* Copyright 2026 The nvscalar Authors
 * SPDX-License-Identifier: Apache-2.0 */

#ifndef NVSCALAR_H
#define NVSCALAR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NvsBranch {
  NVS_BRANCH_E_MINUS = 0,
  NVS_BRANCH_E_PLUS = 1,
} NvsBranch;

typedef enum NvsFormat {
  NVS_FORMAT_CSV = 0,
  NVS_FORMAT_JSON = 1,
} NvsFormat;

typedef enum NvsStatus {
  NVS_STATUS_OK = 0,
  NVS_STATUS_NULL_POINTER = 1,
  NVS_STATUS_INVALID_ARGUMENT = 2,
  NVS_STATUS_DEGENERATE = 3,
  NVS_STATUS_CONFIG = 4,
  NVS_STATUS_IO = 5,
  /**
   * The sweep finished but some points failed; the table holds the rest.
   */
  NVS_STATUS_PARTIAL = 6,
  NVS_STATUS_OUT_OF_RANGE = 7,
  NVS_STATUS_PANIC = 8,
} NvsStatus;

typedef struct NvsSpinModel NvsSpinModel;

typedef struct NvsSweepConfig NvsSweepConfig;

typedef struct NvsTable NvsTable;

/**
 * One exclusion-table row.
 */
typedef struct NvsRow {
  double freq_hz;
  double m_phi_ev;
  double omega1_hz;
  double gamma_up_hz;
  double dalpha_up;
  double dme_up;
  double inv_lambda_gamma_gev;
  double inv_lambda_e_gev;
  bool projected;
} NvsRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL terminated,
 * truncated to `len`). Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t nvs_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *nvs_version(void);

/**
 * # Safety
 * `out` must be a valid pointer; the handle is released with
 * [`nvs_spin_model_free`].
 */
enum NvsStatus nvs_spin_model_new(double zero_field_hz, double b0_tesla, struct NvsSpinModel **out);

/**
 * # Safety
 * `model` must be null or a handle from [`nvs_spin_model_new`].
 */
void nvs_spin_model_free(struct NvsSpinModel *model);

/**
 * Transition frequency of `branch` in Hz.
 *
 * # Safety
 * Pointers must be valid.
 */
enum NvsStatus nvs_spin_transition_hz(const struct NvsSpinModel *model,
                                      enum NvsBranch branch,
                                      double *out_hz);

/**
 * Sensitivity coefficients with the default scaling exponents.
 *
 * # Safety
 * Pointers must be valid.
 */
enum NvsStatus nvs_sensitivity_coefficients(const struct NvsSpinModel *model,
                                            enum NvsBranch branch,
                                            double *k_alpha,
                                            double *k_me);

/**
 * m_φ in eV for a Compton frequency in Hz.
 */
double nvs_mass_from_frequency(double freq_hz);

double nvs_frequency_from_mass(double m_phi_ev);

/**
 * Ω₁·J₁(δ_s/ω_φ). Angular units.
 *
 * # Safety
 * `out` must be valid.
 */
enum NvsStatus nvs_effective_rabi(double omega_phi,
                                  double delta_s,
                                  double rabi_omega1,
                                  double *out);

/**
 * Induced per-direction relaxation rate for a given Ω_eff and detuning.
 *
 * # Safety
 * `out` must be valid.
 */
enum NvsStatus nvs_induced_rate(double omega_eff,
                                double detuning,
                                double gamma1,
                                double gamma2,
                                double *out);

/**
 * Parses and validates a TOML sweep configuration.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` valid.
 */
enum NvsStatus nvs_sweep_config_from_toml(const char *toml, struct NvsSweepConfig **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` valid.
 */
enum NvsStatus nvs_sweep_config_from_file(const char *path, struct NvsSweepConfig **out);

/**
 * Replaces the master seed.
 *
 * # Safety
 * `config` must be a valid handle.
 */
enum NvsStatus nvs_sweep_config_set_seed(struct NvsSweepConfig *config, uint64_t seed);

/**
 * # Safety
 * `config` must be null or a handle from `nvs_sweep_config_from_*`.
 */
void nvs_sweep_config_free(struct NvsSweepConfig *config);

/**
 * Runs the sweep on `workers` threads. On `NVS_STATUS_OK` or
 * `NVS_STATUS_PARTIAL` a table is written to `out`.
 *
 * # Safety
 * `config` must be a valid handle and `out` valid.
 */
enum NvsStatus nvs_run_sweep(const struct NvsSweepConfig *config,
                             size_t workers,
                             struct NvsTable **out);

/**
 * Number of rows, or 0 for a null handle.
 *
 * # Safety
 * `table` must be null or a valid handle.
 */
size_t nvs_table_len(const struct NvsTable *table);

/**
 * # Safety
 * `table` must be null or a valid handle.
 */
size_t nvs_table_failure_count(const struct NvsTable *table);

/**
 * # Safety
 * `table` must be a valid handle and `out` valid.
 */
enum NvsStatus nvs_table_row(const struct NvsTable *table, size_t index, struct NvsRow *out);

/**
 * Writes the table as CSV or JSON.
 *
 * # Safety
 * `table` must be a valid handle and `path` a NUL-terminated string.
 */
enum NvsStatus nvs_table_write(const struct NvsTable *table,
                               const char *path,
                               enum NvsFormat format);

/**
 * # Safety
 * `table` must be null or a handle from [`nvs_run_sweep`].
 */
void nvs_table_free(struct NvsTable *table);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NVSCALAR_H */
