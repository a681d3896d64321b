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

#include <cmath>
#include <string>
#include <vector>

#include "mightlab/config.hpp"

namespace mightlab {

struct RunRecord {
  std::string experiment_name;
  std::string method;
  long d = 0;
  double kappa = 0.0;
  long n = 0;
  long seed = 0;
  std::string stage;
  // NaN marks "not applicable" and is written as an empty field
  double gen_error = std::nan("");
  double mw_frob = std::nan("");
  double mh_frob = std::nan("");
  std::vector<double> per_direction_mh;
  double train_loss_final = std::nan("");
  double wall_time_s = 0.0;
  std::string status = "ok";
  // not serialized: extra measurements for callers of run_single
  double mh_frob_se = std::nan("");
  std::vector<double> per_direction_mh_se;
  double ustar_overlap = std::nan("");
  double stage2_corr = std::nan("");
};

const std::string& csv_header();
std::string format_double(double v);
std::string to_csv_row(const RunRecord& r, bool with_wall_time);
std::vector<std::string> split_csv_line(const std::string& line);

std::vector<RunRecord> run_single(const SweepConfig& cfg, const std::string& method, double kappa, long seed);

struct SweepOptions {
  std::string out_dir;
  long threads = 1;
  bool resume = false;
};

struct SweepResult {
  long cells = 0;
  long cells_skipped = 0;
  long failed = 0;
  long diverged = 0;
  std::string records_path;
  std::string summary_path;
};

SweepResult run_sweep(const SweepConfig& cfg, const SweepOptions& opt);

// Per-(method, kappa, stage) medians over ok rows.
std::string summary_csv(const std::vector<RunRecord>& rows);

}  // namespace mightlab
