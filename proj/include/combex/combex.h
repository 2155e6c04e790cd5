// Copyright 2026 The combex Authors
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


/* C interface to the combex exchange solver. Every call returns a
 * combex_status; on failure combex_last_error() describes the problem for
 * the calling thread. Strings returned through char** are owned by the
 * caller and released with combex_string_free. */

#ifndef COMBEX_COMBEX_H_
#define COMBEX_COMBEX_H_

#include <stddef.h>

#if defined(_WIN32)
#define COMBEX_API __declspec(dllexport)
#else
#define COMBEX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  COMBEX_OK = 0,
  COMBEX_ERR_ARGUMENT = 1, /* null pointer, bad option or bad config */
  COMBEX_ERR_PARSE = 2,    /* malformed JSON or formula */
  COMBEX_ERR_INVALID = 3,  /* instance or outcome breaks the model */
  COMBEX_ERR_IO = 4,
  COMBEX_ERR_INTERNAL = 5
} combex_status;

/* Result verdicts. */
typedef enum {
  COMBEX_VERDICT_OK = 0,      /* core outcome, feasible, or not blocked */
  COMBEX_VERDICT_EMPTY = 1,   /* core empty or infeasible */
  COMBEX_VERDICT_TIMEOUT = 2,
  COMBEX_VERDICT_BLOCKED = 3  /* check found a blocking coalition */
} combex_verdict;

typedef enum {
  COMBEX_MODE_CORE = 0,
  COMBEX_MODE_NCORE = 1, /* coalition_cap bounds coalition size */
  COMBEX_MODE_DYADIC = 2,
  COMBEX_MODE_SINGLE_SIDED = 3
} combex_mode;

typedef struct combex_instance combex_instance;
typedef struct combex_result combex_result;

typedef struct {
  combex_mode mode;
  size_t coalition_cap;  /* used by COMBEX_MODE_NCORE */
  double epsilon;        /* epsilon-core threshold */
  double time_limit_ms;  /* <= 0 means none */
  size_t seed_count;     /* seed cuts added before the first master solve */
  size_t seed_max_size;
} combex_solve_options;

typedef void (*combex_progress_fn)(size_t done, size_t total, void* user);

COMBEX_API const char* combex_version(void);
COMBEX_API const char* combex_last_error(void);
COMBEX_API void combex_string_free(char* s);

COMBEX_API combex_status combex_instance_from_json(const char* json, combex_instance** out);
COMBEX_API combex_status combex_instance_to_json(const combex_instance* instance, char** out);
/* JSON array of problem strings; empty array when valid. */
COMBEX_API combex_status combex_instance_validate(const combex_instance* instance, char** problems_json);
COMBEX_API void combex_instance_free(combex_instance* instance);

/* Airport time-slot generator; config is "key = value" lines. */
COMBEX_API combex_status combex_gen_airport(const char* config, combex_instance** out);
/* Reduction instance for a DNF formula such as "x1 & ~y1 | x2".
 * size_formula != 0 selects the size-based clause valuation.
 * threshold may be null. */
COMBEX_API combex_status combex_gen_qsat2(const char* formula, size_t n, size_t m, int size_formula,
                                          combex_instance** out, double* threshold);
COMBEX_API combex_status combex_qsat2_bruteforce(const char* formula, size_t n, size_t m, int* truth);
/* JSON array of equilibrium-property violations of an outcome on the reduction instance. */
COMBEX_API combex_status combex_qsat2_equilibrium_check(const char* formula, size_t n, size_t m,
                                                  const char* outcome_json, char** violations_json);

COMBEX_API void combex_solve_options_init(combex_solve_options* options);
COMBEX_API combex_status combex_solve(const combex_instance* instance, const combex_solve_options* options,
                                      combex_result** out);
COMBEX_API combex_status combex_least_core(const combex_instance* instance, const combex_solve_options* options,
                                           combex_result** out);
/* Blocking check of an outcome (an outcome document or a solve result).
 * coalition_cap 0 means unbounded. */
COMBEX_API combex_status combex_check(const combex_instance* instance, const char* outcome_json,
                                      size_t coalition_cap, double epsilon, combex_result** out);
/* Runs the benchmark; config is "key = value" lines. output_dir may be null. */
COMBEX_API combex_status combex_bench(const char* config, const char* output_dir, combex_progress_fn progress,
                                      void* user, combex_result** out);

COMBEX_API combex_verdict combex_result_verdict(const combex_result* result);
COMBEX_API double combex_result_value(const combex_result* result); /* welfare, delta or surplus */
COMBEX_API const char* combex_result_json(const combex_result* result);
COMBEX_API const char* combex_result_summary(const combex_result* result);
COMBEX_API void combex_result_free(combex_result* result);

#ifdef __cplusplus
}
#endif

#endif /* COMBEX_COMBEX_H_ */
