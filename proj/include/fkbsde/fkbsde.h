// Copyright 2026 The fkbsde Authors
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

/* C interface to the fkbsde solver. All functions are thread-safe for
 * distinct handles; fkb_last_error is per thread. */

#ifndef FKBSDE_FKBSDE_H_
#define FKBSDE_FKBSDE_H_

#include <stddef.h>

#if defined(_WIN32)
#define FKB_API __declspec(dllexport)
#else
#define FKB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct fkb_config fkb_config;
typedef struct fkb_report fkb_report;

typedef enum fkb_status {
  FKB_OK = 0,
  FKB_ERR_STRUCTURAL = 1,
  FKB_ERR_INVALID_ARGUMENT = 2,
  FKB_ERR_NUMERICAL = 3,
  FKB_ERR_OVERFLOW = 4,
  FKB_ERR_PRECONDITION = 5,
  FKB_ERR_PARSE = 6,
  FKB_ERR_IO = 7,
  FKB_ERR_INTERNAL = 99
} fkb_status;

/* Configs. Loading validates the whole problem. */
FKB_API fkb_status fkb_config_load(const char* path, fkb_config** out);
FKB_API fkb_status fkb_config_parse(const char* text, fkb_config** out);
/* key is "section.key", e.g. "solver.M". */
FKB_API fkb_status fkb_config_set(fkb_config* cfg, const char* key, const char* value);
/* Returned strings are owned by cfg and valid until the next call on cfg. */
FKB_API const char* fkb_config_canonical(fkb_config* cfg);
FKB_API const char* fkb_config_hash(fkb_config* cfg);
FKB_API void fkb_config_free(fkb_config* cfg);

/* u(t, x) at the configured [point]. */
FKB_API fkb_status fkb_evaluate_u(const fkb_config* cfg, unsigned threads, double* value, double* std_error);

/* Runs "solve", "verify-bsde", "verify-fk", "sweep" or "report". For
 * "report", cfg is ignored and out_dir/report.json is re-run; the result is
 * written to out_dir/reproduction. A NULL out_dir writes nothing. Check
 * failures are not errors: they surface in *exit_code (0 pass, 1 fail,
 * 2 error). */
FKB_API fkb_status fkb_run(const fkb_config* cfg, const char* command, const char* out_dir, unsigned threads,
                           double tol_scale, fkb_report** report, int* exit_code);
FKB_API const char* fkb_report_json(const fkb_report* report);
FKB_API int fkb_report_exit_code(const fkb_report* report);
FKB_API void fkb_report_free(fkb_report* report);

FKB_API const char* fkb_last_error(void);
FKB_API const char* fkb_status_string(fkb_status status);
FKB_API const char* fkb_version(void);

#ifdef __cplusplus
}
#endif

#endif /* FKBSDE_FKBSDE_H_ */
