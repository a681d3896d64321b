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

#pragma once

#include <string>
#include <vector>

#include "mightlab/activation.hpp"
#include "mightlab/kernelbase.hpp"
#include "mightlab/targets.hpp"
#include "mightlab/training.hpp"

namespace mightlab {

inline const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> m = {"kernel", "two_layer", "three_layer_layerwise", "three_layer_joint",
                                             "deep_precond"};
  return m;
}

inline const std::vector<std::string>& known_presets() {
  static const std::vector<std::string> p = {"figure4", "figure5", "ablation_reinit", "ablation_reuse",
                                             "parity", "staircase", "deep_theorem2"};
  return p;
}

struct SweepConfig {
  std::string experiment_name = "experiment";
  long d = 64;
  TargetSpec target;
  std::vector<double> kappa_grid = {1.0};
  std::vector<std::string> methods;
  long seeds = 20;
  long n_test = 10000;
  long n_mc_overlap = 1000;
  int mh_bootstrap = 0;
  uint64_t base_seed = 0;
  long threads = 0;  // 0: decided by the caller

  long p1 = 0;            // 0: int(n_max^0.9)
  long p2 = 600;
  long two_layer_p = 0;   // 0: int(p1 / 25)
  Activation activation;
  LayerwiseSchedule schedule;
  JointSchedule joint;
  KernelSpec kernel;
  DeepSchedule deep;
  long kernel_max_n = 8192;
  long memory_cap_n = 50000;
  bool fixed_teacher = true;
  bool record_wall_time = false;
  bool allow_stage_reorder = false;
  std::string notes;

  long n_for(double kappa) const;
  long n_max() const;
  long resolved_p1() const;
  long resolved_two_layer_p() const;
  void validate() const;
};

bool operator==(const SweepConfig& a, const SweepConfig& b);

std::string config_to_json(const SweepConfig& c);
SweepConfig config_from_json(const std::string& text);
SweepConfig load_config(const std::string& path);
void save_config(const SweepConfig& c, const std::string& path);

SweepConfig preset(const std::string& name);

}  // namespace mightlab
