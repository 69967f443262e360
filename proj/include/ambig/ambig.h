// Copyright 2026 The AmbigNLG Toolkit Authors.
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

#ifndef AMBIG_AMBIG_H_
#define AMBIG_AMBIG_H_

/* C interface to the toolkit. Strings are UTF-8. Strings returned through
 * `char**` out-parameters are owned by the caller and released with
 * ambig_string_free. On failure a function returns a non-zero status and
 * ambig_last_error() describes it (per thread). */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(AMBIG_BUILDING_LIBRARY)
#define AMBIG_API __attribute__((visibility("default")))
#else
#define AMBIG_API
#endif

typedef enum ambig_status {
  AMBIG_OK = 0,
  AMBIG_INVALID_ARGUMENT = 1,
  AMBIG_EMPTY_FILLER = 2,
  AMBIG_WRONG_ARITY = 3,
  AMBIG_DUPLICATE_CATEGORY = 4,
  AMBIG_INVALID_CATEGORY = 5,
  AMBIG_TOO_FEW_SAMPLES = 6,
  AMBIG_EMPTY_CANDIDATES = 7,
  AMBIG_LENGTH_MISMATCH = 8,
  AMBIG_MISSING_FIELD = 9,
  AMBIG_UNPARSEABLE_JUDGMENT = 10,
  AMBIG_PROVIDER_UNAVAILABLE = 11,
  AMBIG_BUDGET_EXCEEDED = 12,
  AMBIG_EMBED_UNSUPPORTED = 13,
  AMBIG_PARSE_ERROR = 14,
  AMBIG_DUPLICATE_ID = 15,
  AMBIG_IO_ERROR = 16,
  AMBIG_EMPTY_POOL = 17,
  AMBIG_MISSING_ANNOTATIONS = 18,
  AMBIG_UNKNOWN_SESSION = 19,
  AMBIG_INDEX_OUT_OF_RANGE = 20,
  AMBIG_UNRENDERABLE_CUSTOM_TEXT = 21,
  AMBIG_EMPTY_INSTRUCTION = 22,
  AMBIG_INVALID_RECORD = 23,
  AMBIG_INTERNAL = 100
} ambig_status;

typedef struct ambig_context ambig_context;
typedef void (*ambig_log_fn)(const char* message, void* user_data);

AMBIG_API const char* ambig_version(void);
AMBIG_API const char* ambig_status_name(ambig_status status);
AMBIG_API const char* ambig_last_error(void);
AMBIG_API void ambig_string_free(char* s);

/* ---- pure operations -------------------------------------------------- */

/* fillers_json: JSON array of strings. */
AMBIG_API ambig_status ambig_render_template(const char* category, const char* fillers_json,
                                             char** out_text);

/* parts_json: array of {"category", "text"} or {"category", "fillers"}.
 * separator may be NULL (single space). Output: {"rendered", "parts"}. */
AMBIG_API ambig_status ambig_refine_instruction(const char* base, const char* parts_json,
                                                const char* separator, char** out_json);

AMBIG_API ambig_status ambig_rouge_l(const char* candidate, const char* reference,
                                     double* precision, double* recall, double* f1);

/* samples_json: JSON array of at least two strings. */
AMBIG_API ambig_status ambig_intra_rl(const char* samples_json, double* out);

/* Line-aligned files. A candidate line is plain text or a JSON array of
 * samples. Output: score JSON. */
AMBIG_API ambig_status ambig_score_files(const char* candidates_path,
                                         const char* references_path, char** out_json);

/* Keeps raw records that pass the three NLG rules. Output: summary JSON. */
AMBIG_API ambig_status ambig_filter_sni(const char* in_path, const char* out_path,
                                        char** out_json);

/* ---- context-bound operations ----------------------------------------- */

/* config_json may be NULL for defaults; relative paths in it resolve against
 * base_dir (NULL: current directory). */
AMBIG_API ambig_status ambig_context_new(const char* config_json, const char* base_dir,
                                         ambig_context** out);
AMBIG_API void ambig_context_free(ambig_context* ctx);
AMBIG_API void ambig_context_set_logger(ambig_context* ctx, ambig_log_fn fn, void* user_data);
/* Effective configuration as JSON. */
AMBIG_API ambig_status ambig_context_config(ambig_context* ctx, char** out_json);
/* {"provider_calls", "cache_hits", "cache_misses"} */
AMBIG_API ambig_status ambig_context_stats(ambig_context* ctx, char** out_json);

/* Unvalidated candidates for raw records. categories: comma-separated names
 * or NULL for all six. */
AMBIG_API ambig_status ambig_annotate(ambig_context* ctx, const char* in_path,
                                      const char* out_path, const char* categories,
                                      char** out_json);

/* Runs both gates on every annotation of a dataset and keeps accepted ones.
 * audit_path may be NULL. */
AMBIG_API ambig_status ambig_validate(ambig_context* ctx, const char* in_path,
                                      const char* out_path, const char* audit_path,
                                      char** out_json);

/* Filter, annotate and validate raw records into a dataset. */
AMBIG_API ambig_status ambig_build_dataset(ambig_context* ctx, const char* raw_path,
                                           const char* out_path, const char* audit_path,
                                           char** out_json);

/* Report paths may be NULL. out_json receives the report. */
AMBIG_API ambig_status ambig_eval_mitigation(ambig_context* ctx, const char* dataset_path,
                                             const char* method, const char* report_path,
                                             const char* csv_path, char** out_json);

/* icl_k < 0 uses the configured value; demo_pool_path NULL uses the config. */
AMBIG_API ambig_status ambig_eval_identify(ambig_context* ctx, const char* dataset_path,
                                           int icl_k, const char* demo_pool_path,
                                           const char* report_path, const char* csv_path,
                                           char** out_json);

/* mode: "sampling" or "batch". */
AMBIG_API ambig_status ambig_eval_suggest(ambig_context* ctx, const char* dataset_path, int n,
                                          const char* mode, const char* report_path,
                                          const char* csv_path, char** out_json);

/* Blocks serving the REST API. host NULL / port <= 0 use the config. */
AMBIG_API ambig_status ambig_serve(ambig_context* ctx, const char* host, int port);

#ifdef __cplusplus
}
#endif

#endif /* AMBIG_AMBIG_H_ */
