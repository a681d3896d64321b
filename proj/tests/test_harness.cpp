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

#include <cmath>

#include "doctest.h"
#include "mightlab/harness.hpp"

using namespace mightlab;

namespace {

SweepConfig tiny() {
  SweepConfig c;
  c.experiment_name = "tiny";
  c.d = 8;
  c.target = main_example_spec(8, 2, 3.0);
  c.kappa_grid = {1.5};
  c.methods = {"kernel", "two_layer", "three_layer_layerwise", "three_layer_joint"};
  c.seeds = 2;
  c.n_test = 1000;
  c.n_mc_overlap = 200;
  c.p1 = 12;
  c.p2 = 12;
  c.two_layer_p = 6;
  c.schedule.T1 = 5;
  c.schedule.multi_step_T2 = 5;
  c.joint.T = 5;
  c.schedule.layer2_mode = Layer2Mode::SinglePrecondStep;
  c.schedule.reinit_layer2 = true;
  c.schedule.lambda2_multiplier = 0.1;
  c.activation = Activation::composite_even();
  return c;
}

}  // namespace

TEST_CASE("csv header") {
  CHECK(csv_header() ==
        "experiment_name,method,d,kappa,n,seed,stage,gen_error,mw_frob,mh_frob,per_direction_mh,"
        "train_loss_final,wall_time_s,status");
}

TEST_CASE("missing values are written as empty fields") {
  RunRecord r;
  r.experiment_name = "e";
  r.method = "kernel";
  r.stage = "final";
  r.gen_error = 0.5;
  auto f = split_csv_line(to_csv_row(r, false));
  REQUIRE(f.size() == 14);
  CHECK(f[7] == "0.5");
  CHECK(f[8].empty());
  CHECK(f[9].empty());
  CHECK(f[12] == "0");
  CHECK(f[13] == "ok");
}

TEST_CASE("run_single records") {
  SweepConfig c = tiny();
  auto k = run_single(c, "kernel", 1.5, 0);
  REQUIRE(k.size() == 1);
  CHECK(k[0].stage == "final");
  CHECK(std::isnan(k[0].mw_frob));
  CHECK(k[0].n == c.n_for(1.5));

  auto lw = run_single(c, "three_layer_layerwise", 1.5, 0);
  REQUIRE(lw.size() == 4);
  CHECK(lw[0].stage == "init");
  CHECK(lw[3].stage == "final");
  for (const auto& r : lw) CHECK(r.status == "ok");
  CHECK(std::isfinite(lw[3].gen_error));
  CHECK(lw[3].per_direction_mh.size() == 1);

  CHECK_THROWS_AS(run_single(c, "lasso", 1.5, 0), SpecError);
}

TEST_CASE("a diverging layer-2 stage is reported, not failed") {
  SweepConfig c = tiny();
  c.schedule.layer2_mode = Layer2Mode::MultiStepReuse;
  c.schedule.reinit_layer2 = false;
  c.schedule.multi_step_lr = 1e3;
  c.schedule.multi_step_T2 = 50;
  auto rows = run_single(c, "three_layer_layerwise", 1.5, 0);
  REQUIRE(rows.size() == 4);
  CHECK(rows[1].status == "ok");
  CHECK(rows[2].status == "diverged");
  CHECK(rows[3].status == "diverged");
  CHECK(std::isnan(rows[3].gen_error));
}

TEST_CASE("run_single is deterministic") {
  SweepConfig c = tiny();
  for (const auto& m : c.methods) {
    CAPTURE(m);
    auto a = run_single(c, m, 1.5, 1);
    auto b = run_single(c, m, 1.5, 1);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(to_csv_row(a[i], false) == to_csv_row(b[i], false));
  }
}

TEST_CASE("summary with one seed") {
  SweepConfig c = tiny();
  auto rows = run_single(c, "kernel", 1.5, 0);
  std::string s = summary_csv(rows);
  CHECK(s.find("kernel") != std::string::npos);
}
