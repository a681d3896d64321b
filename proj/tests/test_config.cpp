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

#include <algorithm>

#include "doctest.h"
#include "json.hpp"
#include "mightlab/config.hpp"

using namespace mightlab;

TEST_CASE("every preset validates and round-trips through json") {
  for (const auto& name : known_presets()) {
    CAPTURE(name);
    SweepConfig c = preset(name);
    CHECK_NOTHROW(c.validate());
    CHECK(config_from_json(config_to_json(c)) == c);
  }
}

TEST_CASE("unknown names are rejected") {
  CHECK_THROWS_AS(preset("figure9"), SpecError);
  SweepConfig c = preset("figure4");
  c.methods = {"kernel", "lasso"};
  CHECK_THROWS_AS(c.validate(), SpecError);
  CHECK_THROWS_AS(config_from_json("{\"d\": "), SpecError);
}

TEST_CASE("figure4 preset") {
  SweepConfig c = preset("figure4");
  CHECK(c.methods.size() == 4);
  CHECK(c.kappa_grid.front() == 1.0);
  CHECK(c.kappa_grid.back() == 2.4);
  CHECK(std::is_sorted(c.kappa_grid.begin(), c.kappa_grid.end()));
  CHECK(c.d == 64);
  CHECK(c.target.wstar_rows == 8);
  CHECK(c.n_for(2.0) == 4096);
  CHECK(c.resolved_two_layer_p() == c.resolved_p1() / 25);
}

TEST_CASE("hierarchical presets") {
  CHECK(preset("parity").target.r() == 3);
  CHECK(preset("staircase").target.r() == 2);
  SweepConfig deep = preset("deep_theorem2");
  CHECK(deep.target.depth() == 3);
  CHECK(deep.methods == std::vector<std::string>{"deep_precond"});
}

TEST_CASE("json keeps optional fields at their defaults") {
  SweepConfig base = preset("figure4");
  nlohmann::json j = nlohmann::json::parse(config_to_json(base));
  nlohmann::json minimal;
  for (const char* k : {"experiment_name", "d", "target", "kappa_grid", "methods"}) minimal[k] = j[k];
  SweepConfig c = config_from_json(minimal.dump());
  CHECK(c.target == base.target);
  CHECK(c.seeds == SweepConfig{}.seeds);
  CHECK(c.schedule == LayerwiseSchedule{});
  minimal.erase("d");
  CHECK_THROWS_AS(config_from_json(minimal.dump()), SpecError);
}
