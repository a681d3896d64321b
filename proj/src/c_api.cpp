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

#include "mightlab/mightlab.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <ios>
#include <string>

#include "mightlab/config.hpp"
#include "mightlab/harness.hpp"
#include "mightlab/verify.hpp"

struct ml_config {
  mightlab::SweepConfig cfg;
};

namespace {

thread_local std::string last_error;

ml_status fail(ml_status code, const std::string& msg) {
  last_error = msg;
  return code;
}

template <class F>
ml_status guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const mightlab::SpecError& e) {
    return fail(ML_ERR_SPEC, e.what());
  } catch (const mightlab::SingularityError& e) {
    return fail(ML_ERR_NUMERIC, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(ML_ERR_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(ML_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::out_of_range& e) {
    return fail(ML_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(ML_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(ML_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

const char* ml_last_error(void) { return last_error.c_str(); }

const char* ml_version(void) { return "0.1.0"; }

ml_status ml_config_load(const char* path, ml_config** out) {
  if (!path || !out) return fail(ML_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    {
      std::ifstream probe(path);
      if (!probe) return fail(ML_ERR_IO, std::string("cannot open ") + path);
    }
    *out = new ml_config{mightlab::load_config(path)};
    return ML_OK;
  });
}

ml_status ml_config_from_preset(const char* name, ml_config** out) {
  if (!name || !out) return fail(ML_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new ml_config{mightlab::preset(name)};
    return ML_OK;
  });
}

ml_status ml_config_save(const ml_config* cfg, const char* path) {
  if (!cfg || !path) return fail(ML_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    mightlab::save_config(cfg->cfg, path);
    return ML_OK;
  });
}

ml_status ml_config_threads(const ml_config* cfg, long* threads) {
  if (!cfg || !threads) return fail(ML_ERR_INVALID_ARGUMENT, "null argument");
  *threads = cfg->cfg.threads;
  return ML_OK;
}

void ml_config_free(ml_config* cfg) { delete cfg; }

ml_status ml_sweep(const ml_config* cfg, const char* out_dir, long threads, int resume, long* n_failed) {
  if (!cfg || !out_dir) return fail(ML_ERR_INVALID_ARGUMENT, "null argument");
  if (threads < 1) return fail(ML_ERR_INVALID_ARGUMENT, "threads must be at least 1");
  return guarded([&] {
    mightlab::SweepOptions opt;
    opt.out_dir = out_dir;
    opt.threads = threads;
    opt.resume = resume != 0;
    mightlab::SweepResult r = mightlab::run_sweep(cfg->cfg, opt);
    if (n_failed) *n_failed = r.failed;
    return ML_OK;
  });
}

ml_status ml_single(const ml_config* cfg, const char* method, double kappa, long seed, char** csv_out,
                    long* n_failed) {
  if (!cfg || !method || !csv_out) return fail(ML_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto rows = mightlab::run_single(cfg->cfg, method, kappa, seed);
    std::string text = mightlab::csv_header() + "\n";
    long failed = 0;
    for (const auto& r : rows) {
      text += mightlab::to_csv_row(r, cfg->cfg.record_wall_time) + "\n";
      if (r.status == "failed") failed = 1;
    }
    if (n_failed) *n_failed = failed;
    *csv_out = dup_string(text);
    return *csv_out ? ML_OK : fail(ML_ERR_INTERNAL, "out of memory");
  });
}

ml_status ml_verify(char** report, int* all_pass) {
  if (!report || !all_pass) return fail(ML_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto res = mightlab::verify();
    bool ok = true;
    for (const auto& p : res) ok = ok && p.pass;
    *all_pass = ok ? 1 : 0;
    *report = dup_string(mightlab::format_report(res));
    return ML_OK;
  });
}

void ml_string_free(char* s) { std::free(s); }

}  // extern "C"
