#ifndef JAMSEC_H
#define JAMSEC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdint.h>
#include <stdbool.h>

typedef enum JamsecStatus {
  JAMSEC_STATUS_OK = 0,
  JAMSEC_STATUS_NULL_POINTER = 1,
  JAMSEC_STATUS_INVALID_ARGUMENT = 2,
  JAMSEC_STATUS_INVALID_CONFIG = 3,
  JAMSEC_STATUS_SOLVER_FAILURE = 4,
  JAMSEC_STATUS_PANIC = 5,
} JamsecStatus;

typedef enum JamsecRegion {
  // Jamming cost below outage odds: battery accumulates.
  JAMSEC_REGION_D1 = 0,
  // Both terms equal.
  JAMSEC_REGION_BOUNDARY = 1,
  JAMSEC_REGION_D2 = 2,
} JamsecRegion;

typedef enum JamsecSolverPath {
  JAMSEC_SOLVER_PATH_SINGLE_ACCUMULATION = 0,
  JAMSEC_SOLVER_PATH_SINGLE_BOUNDARY = 1,
  JAMSEC_SOLVER_PATH_MULTI_BOUNDARY = 2,
} JamsecSolverPath;

// Opaque scenario handle.
typedef struct JamsecScenario JamsecScenario;

typedef struct JamsecDerived {
  double rho_d;
  // Mean energy harvested per power-transfer block, joules.
  double rho_j;
  double k1;
  double k2;
  // NaN for a single-antenna jammer.
  double m;
  double secrecy_factor;
} JamsecDerived;

typedef struct JamsecThroughput {
  double pi;
  double p_tx;
  double p_co;
  double p_so;
  // Least jamming power meeting the secrecy constraint, watts.
  double jam_power;
  double term_a;
  double term_b;
  enum JamsecRegion region;
} JamsecThroughput;

typedef struct JamsecOptimum {
  double rt;
  double rs;
  double jam_power;
  double pi;
  double residual;
  uint64_t iterations;
  enum JamsecRegion region;
  enum JamsecSolverPath path;
} JamsecOptimum;

typedef struct JamsecSimSummary {
  uint64_t n_it;
  uint64_t n_pt;
  double p_tx;
  double p_tx_se;
  double p_co;
  double p_so;
  double mean_harvested_power;
  double final_energy;
} JamsecSimSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *jamsec_last_error(void);

double jamsec_dbm_to_watts(double p_dbm);

double jamsec_watts_to_dbm(double p_watts);

// New scenario with the reference parameters. Never NULL.
struct JamsecScenario *jamsec_scenario_new_default(void);

// Parses `key = value` lines over the defaults into a new handle.
//
// # Safety
// `text` must be a NUL-terminated string and `out_handle` a valid pointer.
enum JamsecStatus jamsec_scenario_from_text(const char *text, struct JamsecScenario **out_handle);

// # Safety
// `s` must come from this library and not be used afterwards. NULL is ignored.
void jamsec_scenario_free(struct JamsecScenario *s);

// Sets one config key. On error the scenario is left unchanged.
//
// # Safety
// `s` must be a live handle; `key` and `value` NUL-terminated strings.
enum JamsecStatus jamsec_scenario_set(struct JamsecScenario *s, const char *key, const char *value);

// # Safety
// `s` must be a live handle and `result` a valid pointer.
enum JamsecStatus jamsec_derived(const struct JamsecScenario *s, struct JamsecDerived *result);

// Throughput at (rt, rs) with the secrecy-optimal jamming power.
//
// # Safety
// `s` must be a live handle and `result` a valid pointer.
enum JamsecStatus jamsec_throughput(const struct JamsecScenario *s,
                                    double rt,
                                    double rs,
                                    struct JamsecThroughput *result);

// Throughput-optimal rates and jamming power.
//
// # Safety
// `s` must be a live handle and `result` a valid pointer.
enum JamsecStatus jamsec_optimize(const struct JamsecScenario *s, struct JamsecOptimum *result);

// Simulates `n_blocks` blocks at jamming power `jam_power` (watts).
//
// # Safety
// `s` must be a live handle and `result` a valid pointer.
enum JamsecStatus jamsec_simulate(const struct JamsecScenario *s,
                                  double rt,
                                  double rs,
                                  double jam_power,
                                  uint64_t n_blocks,
                                  uint64_t seed,
                                  struct JamsecSimSummary *result);

// Library version, static storage.
const char *jamsec_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JAMSEC_H */
