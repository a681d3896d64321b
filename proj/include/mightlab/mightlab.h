/*
   Copyright 2026 The might-lab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef MIGHTLAB_H_
#define MIGHTLAB_H_

#ifdef __cplusplus
extern "C" {
#endif

#if defined(MIGHTLAB_BUILDING)
#define ML_API __attribute__((visibility("default")))
#else
#define ML_API
#endif

typedef enum {
  ML_OK = 0,
  ML_ERR_INVALID_ARGUMENT = 1,
  ML_ERR_IO = 2,
  ML_ERR_SPEC = 3,
  ML_ERR_NUMERIC = 4,
  ML_ERR_INTERNAL = 5
} ml_status;

typedef struct ml_config ml_config;

/* Message of the last failing call on this thread; never NULL. */
ML_API const char* ml_last_error(void);
ML_API const char* ml_version(void);

ML_API ml_status ml_config_load(const char* path, ml_config** out);
ML_API ml_status ml_config_from_preset(const char* name, ml_config** out);
ML_API ml_status ml_config_save(const ml_config* cfg, const char* path);
ML_API ml_status ml_config_threads(const ml_config* cfg, long* threads);
ML_API void ml_config_free(ml_config* cfg);

/* Runs every cell of the grid into out_dir. n_failed receives the number of
   cells with at least one failed row. */
ML_API ml_status ml_sweep(const ml_config* cfg, const char* out_dir, long threads, int resume, long* n_failed);

/* Runs one cell. csv_out receives header plus rows; free with ml_string_free. */
ML_API ml_status ml_single(const ml_config* cfg, const char* method, double kappa, long seed, char** csv_out,
                           long* n_failed);

ML_API ml_status ml_verify(char** report, int* all_pass);

ML_API void ml_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
