// Copyright 2026 The spikediff Authors.
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

#ifndef SPIKEDIFF_SPIKEDIFF_H_
#define SPIKEDIFF_SPIKEDIFF_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SD_API __declspec(dllexport)
#else
#define SD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Values 2-4 double as the CLI exit codes. */
typedef enum sd_status {
  SD_OK = 0,
  SD_ERR_INVALID_ARGUMENT = 1,
  SD_ERR_CONFIG = 2,
  SD_ERR_CAPACITY = 3,
  SD_ERR_NUMERICAL = 4,
  SD_ERR_IO = 5,
  SD_ERR_INTERNAL = 6
} sd_status;

typedef struct sd_matrix sd_matrix;
typedef struct sd_denoiser sd_denoiser;

SD_API const char* sd_version(void);

/* Message for the most recent failing call on this thread ("" if none). */
SD_API const char* sd_last_error(void);

/* n×n matrix copied from row-major `data`; zero-filled when data is NULL. */
SD_API sd_status sd_matrix_create(size_t n, const double* data, sd_matrix** out);
SD_API void sd_matrix_destroy(sd_matrix* m);
SD_API size_t sd_matrix_dim(const sd_matrix* m);
/* Copies n*n entries in row-major order; `len` is the buffer length. */
SD_API sd_status sd_matrix_read(const sd_matrix* m, double* out, size_t len);
SD_API sd_status sd_matrix_norms(const sd_matrix* m, double* frobenius, double* op);

/* Draw from the target ("spiked", "centered_spiked" or "mixture"). The
 * draw is a pure function of (seed, label). */
SD_API sd_status sd_sample_target(const char* kind, size_t n, size_t k, uint64_t seed,
                                  uint64_t label, sd_matrix** out);

/* y = t·x + √t·g with g keyed by (seed, label). */
SD_API sd_status sd_observe(const sd_matrix* x, double t, uint64_t seed, uint64_t label,
                            sd_matrix** out);

SD_API sd_status sd_thresholds(size_t n, size_t k, double* t_alg, double* t_bayes);

/* Denoiser from a JSON spec, e.g. {"id":"alg1","epsilon":0.6}. Randomized
 * denoisers draw from (seed). */
SD_API sd_status sd_denoiser_create(const char* spec_json, size_t n, size_t k,
                                    uint64_t seed, sd_denoiser** out);
SD_API void sd_denoiser_destroy(sd_denoiser* d);
/* Estimator id; owned by the handle. */
SD_API const char* sd_denoiser_id(const sd_denoiser* d);
SD_API sd_status sd_denoiser_evaluate(sd_denoiser* d, const sd_matrix* y, double t,
                                      sd_matrix** out);

/* Euler diffusion from ŷ_0 = 0 to t_max (rounded up to a multiple of delta)
 * with `d` as drift. Either output pointer may be NULL. */
SD_API sd_status sd_euler_sample(sd_denoiser* d, double delta, double t_max, uint64_t seed,
                                 sd_matrix** final_sample, sd_matrix** final_state);

typedef struct sd_run_options {
  int override_seed; /* nonzero: use `seed` instead of the config's */
  uint64_t seed;
  int override_enum_cap;
  double enum_cap;
  size_t threads; /* 0 or 1: single-threaded */
} sd_run_options;

/* Runs one experiment from a JSON config and writes its artifact to
 * out_path ("-" for stdout; NULL for the config's "output" key). `options`
 * may be NULL. */
SD_API sd_status sd_run_experiment(const char* subcommand, const char* config_json,
                                   const char* out_path, const sd_run_options* options);

#ifdef __cplusplus
}
#endif

#endif  // SPIKEDIFF_SPIKEDIFF_H_
