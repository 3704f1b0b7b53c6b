/* Copyright 2026 The nvscalar Authors
 * SPDX-License-Identifier: Apache-2.0 */

#include <math.h>
#include <stdio.h>

#include "nvscalar.h"

#define CHECK(cond)                                              \
  do {                                                           \
    if (!(cond)) {                                               \
      char msg[256];                                             \
      nvs_last_error_message(msg, sizeof msg);                   \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__,    \
              #cond, msg);                                       \
      return 1;                                                  \
    }                                                            \
  } while (0)

int main(void) {
  NvsSpinModel *spin = NULL;
  double ka = 0.0, km = 0.0;
  CHECK(nvs_spin_model_new(2.87e9, 0.051, &spin) == NVS_STATUS_OK);
  CHECK(nvs_sensitivity_coefficients(spin, NVS_BRANCH_E_MINUS, &ka, &km) == NVS_STATUS_OK);
  CHECK(fabs(ka - 6.976) < 1e-3 && fabs(km - 3.976) < 1e-3);
  nvs_spin_model_free(spin);

  CHECK(fabs(nvs_mass_from_frequency(12e9) * 1e6 - 49.63) < 1e-2);

  NvsSweepConfig *cfg = NULL;
  CHECK(nvs_sweep_config_from_toml("[sweep]\npoints = 7\n", &cfg) == NVS_STATUS_OK);
  NvsTable *table = NULL;
  CHECK(nvs_run_sweep(cfg, 2, &table) == NVS_STATUS_OK);
  CHECK(nvs_table_len(table) == 7);
  NvsRow row;
  CHECK(nvs_table_row(table, 6, &row) == NVS_STATUS_OK);
  CHECK(fabs(row.freq_hz / 12e9 - 1.0) < 1e-9 && !row.projected);
  CHECK(nvs_table_row(table, 7, &row) == NVS_STATUS_OUT_OF_RANGE);
  nvs_table_free(table);
  nvs_sweep_config_free(cfg);

  CHECK(nvs_sweep_config_from_toml("[sweep]\nnope = 1\n", &cfg) == NVS_STATUS_CONFIG);
  printf("ok %s\n", nvs_version());
  return 0;
}
