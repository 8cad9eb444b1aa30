// Copyright 2026 The rpzeno Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RPZENO_RPZENO_H_
#define RPZENO_RPZENO_H_

/*
 * C interface to the rpzeno radical-pair engine.
 *
 * Every function returns an rpz_status. On failure a message is available
 * from rpz_last_error() on the calling thread until the next call.
 * Configurations are opaque handles released with rpz_config_free().
 *
 * Units: rates in 1/us, angles in rad, fields in mT.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(RPZENO_BUILDING_LIBRARY)
#define RPZ_API __attribute__((visibility("default")))
#else
#define RPZ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rpz_status {
  RPZ_OK = 0,
  RPZ_INVALID_ARGUMENT = 1,
  RPZ_CONFIG = 2,
  RPZ_PARTIAL = 3, /* finished with failed cells or orientations */
  RPZ_NUMERICAL = 4,
  RPZ_IO = 5,
  RPZ_RESUME_MISMATCH = 6,
  RPZ_INTERRUPTED = 7, /* checkpoint kept; rerun to resume */
  RPZ_INTERNAL = 8
} rpz_status;

typedef struct rpz_config rpz_config;

typedef void (*rpz_log_fn)(void* user, const char* message);

typedef struct rpz_run_options {
  const char* out_dir;         /* NULL: output.directory from the config */
  unsigned threads;            /* 0: RPZENO_THREADS, else 1 */
  int render;                  /* nonzero: write SVG/PNG figures */
  const char* checkpoint_path; /* sweep only; NULL: <out>/sweep.checkpoint.json */
  int fresh;                   /* nonzero: discard an existing checkpoint */
  size_t stop_after_units;     /* 0: run to completion */
  rpz_log_fn log;
  void* log_user;
} rpz_run_options;

typedef struct rpz_run_report {
  size_t failed_cells;
  uint64_t eigendecompositions;
  size_t files_written;
  double wall_seconds;
} rpz_run_report;

RPZ_API const char* rpz_version(void);
RPZ_API const char* rpz_last_error(void);
RPZ_API const char* rpz_status_name(rpz_status status);

RPZ_API rpz_status rpz_config_from_text(const char* text, rpz_config** out);
RPZ_API rpz_status rpz_config_from_file(const char* path, rpz_config** out);
RPZ_API void rpz_config_free(rpz_config* config);

RPZ_API rpz_status rpz_config_set_seed(rpz_config* config, uint64_t seed);
/* "k_b=log:1e-3:1e6:50,k_f=1", values in base units. */
RPZ_API rpz_status rpz_config_apply_override(rpz_config* config, const char* spec);
RPZ_API rpz_status rpz_config_hilbert_dim(const rpz_config* config, size_t* out);

/* Copies a NUL-terminated string into buf when it fits; *needed receives the
 * required size including the terminator. */
RPZ_API rpz_status rpz_config_canonical(const rpz_config* config, char* buf, size_t cap,
                                        size_t* needed);
/* 64 hex digits plus NUL. */
RPZ_API rpz_status rpz_config_hash(const rpz_config* config, char out[65]);

RPZ_API void rpz_run_options_init(rpz_run_options* options);

RPZ_API rpz_status rpz_run_yield(const rpz_config* config, const rpz_run_options* options,
                                 rpz_run_report* report);
RPZ_API rpz_status rpz_run_sweep(const rpz_config* config, const rpz_run_options* options,
                                 rpz_run_report* report);
RPZ_API rpz_status rpz_run_eigen(const rpz_config* config, const rpz_run_options* options,
                                 rpz_run_report* report);
RPZ_API rpz_status rpz_run_coherence(const rpz_config* config, const rpz_run_options* options,
                                     rpz_run_report* report);

/* Async-signal-safe. Running commands stop at the next unit boundary. */
RPZ_API void rpz_request_cancel(void);
RPZ_API void rpz_clear_cancel(void);

/* Recombination yield for one field orientation using the scalar kinetics
 * of the config. */
RPZ_API rpz_status rpz_yield_at(const rpz_config* config, double theta, double phi, double* out);

/* Eigenvalues of H_eff at one orientation and k_b, sorted by real then
 * imaginary part. *count receives the Hilbert dimension. */
RPZ_API rpz_status rpz_eigenvalues(const rpz_config* config, double theta, double phi, double k_b,
                                   double* re, double* im, size_t cap, size_t* count);

#ifdef __cplusplus
}
#endif

#endif  // RPZENO_RPZENO_H_
