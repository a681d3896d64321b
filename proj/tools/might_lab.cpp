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

#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "mightlab/mightlab.h"

namespace {

int report(ml_status st) {
  std::fprintf(stderr, "might-lab: %s\n", ml_last_error());
  return st == ML_ERR_INVALID_ARGUMENT || st == ML_ERR_SPEC ? 2 : 1;
}

long resolve_threads(long flag, const ml_config* cfg) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("MIGHTLAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
    std::fprintf(stderr, "might-lab: ignoring MIGHTLAB_THREADS=%s\n", env);
  }
  long from_cfg = 0;
  if (ml_config_threads(cfg, &from_cfg) == ML_OK && from_cfg > 0) return from_cfg;
  long hw = static_cast<long>(std::thread::hardware_concurrency());
  return hw > 0 ? hw : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"might-lab: layerwise training experiments for hierarchical targets"};
  app.require_subcommand(1);

  std::string config_path, out_dir, method, preset_name, out_path;
  long threads = 0, seed = 0;
  double kappa = 0.0;
  bool resume = false;

  auto* sweep = app.add_subcommand("sweep", "run a configured grid of cells");
  sweep->add_option("--config", config_path)->required();
  sweep->add_option("--out", out_dir)->required();
  sweep->add_option("--threads", threads)->check(CLI::PositiveNumber);
  sweep->add_flag("--resume", resume);

  auto* single = app.add_subcommand("single", "run one cell and print its rows");
  single->add_option("--config", config_path)->required();
  single->add_option("--method", method)->required();
  single->add_option("--kappa", kappa)->required();
  single->add_option("--seed", seed)->required();

  auto* verify = app.add_subcommand("verify", "run the built-in property checks");

  auto* emit = app.add_subcommand("emit-config", "write a preset configuration");
  emit->add_option("--preset", preset_name)->required();
  emit->add_option("--out", out_path)->required();

  CLI11_PARSE(app, argc, argv);

  if (*verify) {
    char* text = nullptr;
    int ok = 0;
    ml_status st = ml_verify(&text, &ok);
    if (st != ML_OK) return report(st);
    std::fputs(text, stdout);
    ml_string_free(text);
    return ok ? 0 : 1;
  }

  if (*emit) {
    ml_config* cfg = nullptr;
    ml_status st = ml_config_from_preset(preset_name.c_str(), &cfg);
    if (st != ML_OK) return report(st);
    st = ml_config_save(cfg, out_path.c_str());
    ml_config_free(cfg);
    return st == ML_OK ? 0 : report(st);
  }

  ml_config* cfg = nullptr;
  ml_status st = ml_config_load(config_path.c_str(), &cfg);
  if (st != ML_OK) return report(st);

  long failed = 0;
  if (*sweep) {
    st = ml_sweep(cfg, out_dir.c_str(), resolve_threads(threads, cfg), resume ? 1 : 0, &failed);
  } else {
    char* csv = nullptr;
    st = ml_single(cfg, method.c_str(), kappa, seed, &csv, &failed);
    if (st == ML_OK) {
      std::fputs(csv, stdout);
      ml_string_free(csv);
    }
  }
  ml_config_free(cfg);
  if (st != ML_OK) return report(st);
  if (failed > 0) std::fprintf(stderr, "might-lab: %ld cell(s) failed\n", failed);
  return failed > 0 ? 1 : 0;
}
