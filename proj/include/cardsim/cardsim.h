/*
 * Copyright (c) 2026, The cardsim Authors
 * SPDX-License-Identifier: Apache-2.0
 */

/*
 * C interface to the cardsim split fine-tuning co-simulator.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns a cardsim_status;
 * on failure cardsim_last_error() describes the problem (thread-local,
 * valid until the next failing call on the same thread).
 *
 * Device and round indices are 0-based.
 */

#ifndef CARDSIM_H
#define CARDSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CARDSIM_BUILDING_LIBRARY)
#    define CARDSIM_API __declspec(dllexport)
#  else
#    define CARDSIM_API __declspec(dllimport)
#  endif
#else
#  define CARDSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cardsim_status {
  CARDSIM_OK = 0,
  CARDSIM_E_INVALID_ARGUMENT = 1, /* null handle, bad name, bad index */
  CARDSIM_E_VALIDATION = 2,       /* scenario or parameter violates an invariant */
  CARDSIM_E_INFEASIBLE = 3,       /* a device needs more than the server's F_max */
  CARDSIM_E_OUTAGE = 4,           /* persistent zero-rate link */
  CARDSIM_E_IO = 5,               /* file could not be read or written */
  CARDSIM_E_RUNTIME = 6           /* anything else */
} cardsim_status;

typedef struct cardsim_scenario cardsim_scenario;
typedef struct cardsim_result cardsim_result;

typedef struct cardsim_scenario_info {
  uint32_t num_devices;
  uint32_t num_layers;
  uint32_t rounds;
  uint32_t local_epochs;
  uint64_t seed;
  double weight;
  double compression_ratio;
} cardsim_scenario_info;

typedef struct cardsim_decision {
  uint32_t cut_layer;
  double server_freq_hz;
  double cost_u;
  double delay_s;
  double energy_j;
  double d_min_s, d_max_s, e_min_j, e_max_j;
  double snr_up_db, snr_down_db;
  double rate_up_bps, rate_down_bps;
  uint32_t outage_redraws;
  int clamped;
} cardsim_decision;

typedef struct cardsim_cut_cost {
  uint32_t cut_layer;
  double cost_u;
  double delay_s;
  double energy_j;
} cardsim_cut_cost;

typedef struct cardsim_summary_row {
  const char* policy;  /* owned by the result */
  const char* device;  /* index as text, or "all" */
  double mean_delay_s;
  double mean_energy_j;
  double mean_cost_u;
} cardsim_summary_row;

CARDSIM_API const char* cardsim_version(void);
CARDSIM_API const char* cardsim_last_error(void);

/* Scenarios ------------------------------------------------------------- */

/* state: "good", "normal" or "poor"; NULL means "normal". */
CARDSIM_API cardsim_status cardsim_scenario_builtin(const char* state,
                                                    cardsim_scenario** out);
/* strict != 0 rejects unknown JSON fields; otherwise they become warnings. */
CARDSIM_API cardsim_status cardsim_scenario_load(const char* path, int strict,
                                                 cardsim_scenario** out);
CARDSIM_API cardsim_status cardsim_scenario_clone(const cardsim_scenario* s,
                                                  cardsim_scenario** out);
CARDSIM_API void cardsim_scenario_free(cardsim_scenario* s);
CARDSIM_API cardsim_status cardsim_scenario_save(const cardsim_scenario* s,
                                                 const char* path);
CARDSIM_API cardsim_status cardsim_scenario_validate(const cardsim_scenario* s);
CARDSIM_API cardsim_status cardsim_scenario_info_get(const cardsim_scenario* s,
                                                     cardsim_scenario_info* out);
CARDSIM_API size_t cardsim_scenario_warning_count(const cardsim_scenario* s);
CARDSIM_API const char* cardsim_scenario_warning(const cardsim_scenario* s, size_t i);

CARDSIM_API cardsim_status cardsim_scenario_set_rounds(cardsim_scenario* s, uint32_t rounds);
CARDSIM_API cardsim_status cardsim_scenario_set_seed(cardsim_scenario* s, uint64_t seed);
CARDSIM_API cardsim_status cardsim_scenario_set_weight(cardsim_scenario* s, double w);
CARDSIM_API cardsim_status cardsim_scenario_set_pathloss_exponent(cardsim_scenario* s,
                                                                  double alpha);
CARDSIM_API cardsim_status cardsim_scenario_set_batch_size(cardsim_scenario* s,
                                                           uint32_t batch);
/* Comma-separated policy names (card, server-only, device-only, cut:N,
 * freq:HZ, cut:N@freq:HZ). */
CARDSIM_API cardsim_status cardsim_scenario_set_policies(cardsim_scenario* s,
                                                         const char* policies);

/* Single-round diagnostics -------------------------------------------- */

/* CARD decision for (device, round). If rows is non-NULL it receives up to
 * rows_capacity per-cut evaluations; *rows_len (if non-NULL) receives the
 * number of cuts evaluated (num_layers + 1). */
CARDSIM_API cardsim_status cardsim_decide(const cardsim_scenario* s, uint32_t device,
                                          uint32_t round, cardsim_decision* out,
                                          cardsim_cut_cost* rows, size_t rows_capacity,
                                          size_t* rows_len);
/* Writes decisions.csv (cut_layer,cost_u,delay_s,energy_j) for (device, round). */
CARDSIM_API cardsim_status cardsim_write_decisions_csv(const cardsim_scenario* s,
                                                       uint32_t device, uint32_t round,
                                                       const char* path);

/* Experiments --------------------------------------------------------- */

/* policies NULL uses the scenario's own list. threads <= 1 runs serially. */
CARDSIM_API cardsim_status cardsim_run(const cardsim_scenario* s, const char* policies,
                                       unsigned threads, cardsim_result** out);
CARDSIM_API void cardsim_result_free(cardsim_result* r);
/* Writes rounds.csv, summary.csv and reductions.csv into dir. */
CARDSIM_API cardsim_status cardsim_result_write_csv(const cardsim_result* r,
                                                    const char* dir);
/* metric: "delay" or "energy"; baseline: policy name. Value in percent. */
CARDSIM_API cardsim_status cardsim_result_reduction(const cardsim_result* r,
                                                    const char* metric,
                                                    const char* baseline, double* pct);
CARDSIM_API size_t cardsim_result_summary_count(const cardsim_result* r);
CARDSIM_API cardsim_status cardsim_result_summary_row(const cardsim_result* r, size_t i,
                                                      cardsim_summary_row* out);

#ifdef __cplusplus
}
#endif

#endif /* CARDSIM_H */
