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

// Acceptance suite: one line per criterion, exit status 1 if any fails.
// Network widths and seed counts are below the full figure scale so that the
// whole suite runs in minutes on one core; the thresholds are not.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mightlab/diagnostics.hpp"
#include "mightlab/harness.hpp"
#include "mightlab/kernelbase.hpp"
#include "mightlab/verify.hpp"

using namespace mightlab;
namespace fs = std::filesystem;

namespace {

constexpr long kAccP1 = 600;
constexpr long kAccJointWidth = 200;
constexpr long kLayerwiseSeeds = 3;
constexpr long kStageSeeds = 5;
constexpr long kJointSeeds = 2;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char b[64];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

double median_of(const std::vector<RunRecord>& rows, const std::string& stage, double RunRecord::*field) {
  std::vector<double> v;
  for (const auto& r : rows)
    if (r.stage == stage && r.status == "ok") v.push_back(r.*field);
  return v.empty() ? std::nan("") : median(v);
}

void progress(const std::string& what) { std::fprintf(stderr, "  .. %s\n", what.c_str()); }

// figure4 at reduced width: the stage-1 rate keeps its effective value 0.5
SweepConfig figure_config() {
  SweepConfig c = preset("figure4");
  c.two_layer_p = c.resolved_two_layer_p();
  c.p1 = kAccP1;
  c.p2 = kAccP1;
  c.schedule.p2_reinit = kAccP1;
  c.schedule.eta1_prefactor = 0.5 / std::sqrt(static_cast<double>(kAccP1 * c.target.wstar_rows));
  c.schedule.eta2_prefactor = 1.0 / std::sqrt(static_cast<double>(kAccP1));
  c.n_mc_overlap = 2000;
  return c;
}

SweepConfig joint_config() {
  SweepConfig c = figure_config();
  c.p1 = kAccJointWidth;
  c.p2 = kAccJointWidth;
  return c;
}

SweepConfig hierarchical_config(const std::string& name) {
  SweepConfig c = preset(name);
  c.p1 = kAccP1;
  c.p2 = kAccP1;
  c.schedule.p2_reinit = kAccP1;
  c.schedule.eta1_prefactor = 0.5 / std::sqrt(static_cast<double>(kAccP1 * c.target.wstar_rows));
  c.schedule.eta2_prefactor = 1.0 / std::sqrt(static_cast<double>(kAccP1));
  c.n_mc_overlap = 2000;
  return c;
}

class Runs {
 public:
  std::vector<RunRecord> get(const SweepConfig& cfg, const std::string& method, double kappa, long seeds) {
    std::string key = cfg.experiment_name + "/" + std::to_string(cfg.p1) + "/" + method + "/" + fmt("%.2f", kappa);
    auto& rows = cache_[key];
    auto& have = seeds_[key];
    for (long s = have; s < seeds; ++s) {
      progress(method + " kappa=" + fmt("%.2f", kappa) + " seed=" + std::to_string(s));
      auto r = run_single(cfg, method, kappa, s);
      rows.insert(rows.end(), r.begin(), r.end());
    }
    have = std::max(have, seeds);
    std::vector<RunRecord> out;
    for (const auto& r : rows)
      if (r.seed < seeds) out.push_back(r);
    return out;
  }

 private:
  std::map<std::string, std::vector<RunRecord>> cache_;
  std::map<std::string, long> seeds_;
};

Outcome property_suite() {
  auto res = verify({});
  Outcome o{true, ""};
  for (const auto& p : res) {
    if (!p.pass) {
      o.pass = false;
      o.detail += p.name + "=" + fmt("%.3g", p.value) + " ";
    }
  }
  if (o.pass) o.detail = std::to_string(res.size()) + " properties within tolerance";
  return o;
}

Outcome composition_scaling() {
  double r[2];
  const long widths[2] = {16, 256};
  for (int i = 0; i < 2; ++i) {
    RngStream tr(0, "acceptance/composition/target");
    Target t = build_target(main_example_spec(512, widths[i], 3.0), tr);
    RngStream mc(0, "acceptance/composition/mc");
    r[i] = hermite_composition_residual(t, 2, 100000, mc);
  }
  double ratio = r[0] / r[1];
  return {ratio >= 2.5, "residual " + fmt("%.4g", r[0]) + " -> " + fmt("%.4g", r[1]) + ", ratio " +
                            fmt("%.3g", ratio) + " (need >= 2.5)"};
}

Outcome stage1_recovery(Runs& runs) {
  SweepConfig c = figure_config();
  auto lo = runs.get(c, "three_layer_layerwise", 1.2, kStageSeeds);
  auto hi = runs.get(c, "three_layer_layerwise", 1.6, kStageSeeds);
  double init_hi = median_of(hi, "init", &RunRecord::ustar_overlap);
  double hi_1 = median_of(hi, "stage1", &RunRecord::ustar_overlap);
  double init_lo = median_of(lo, "init", &RunRecord::ustar_overlap);
  double lo_1 = median_of(lo, "stage1", &RunRecord::ustar_overlap);
  bool ok = hi_1 >= 2.0 * init_hi && lo_1 <= 1.3 * init_lo;
  return {ok, "kappa 1.6: " + fmt("%.3f", init_hi) + " -> " + fmt("%.3f", hi_1) + " (need >= 2x); kappa 1.2: " +
                  fmt("%.3f", init_lo) + " -> " + fmt("%.3f", lo_1) + " (need <= 1.3x)"};
}

Outcome stage2_recovery(Runs& runs) {
  SweepConfig c = figure_config();
  double hi = median_of(runs.get(c, "three_layer_layerwise", 1.6, kStageSeeds), "stage2", &RunRecord::stage2_corr);
  double lo = median_of(runs.get(c, "three_layer_layerwise", 1.2, kStageSeeds), "stage2", &RunRecord::stage2_corr);
  return {hi >= 0.8 && lo <= 0.3,
          "median corr(h2, h*) kappa 1.6: " + fmt("%.3f", hi) + " (need >= 0.8); kappa 1.2: " + fmt("%.3f", lo) +
              " (need <= 0.3)"};
}

Outcome figure4_ordering(Runs& runs) {
  SweepConfig c = figure_config();
  const double kappa = 2.0;
  double ek = median_of(runs.get(c, "kernel", kappa, kLayerwiseSeeds), "final", &RunRecord::gen_error);
  double e2 = median_of(runs.get(c, "two_layer", kappa, kLayerwiseSeeds), "final", &RunRecord::gen_error);
  double e3 = median_of(runs.get(c, "three_layer_layerwise", kappa, kLayerwiseSeeds), "final", &RunRecord::gen_error);
  progress("polynomial oracles");
  RngStream tr(c.base_seed, "target");
  Target t = build_target(c.target, tr);
  RngStream o2(0, "acceptance/oracle/quadratic"), o4(0, "acceptance/oracle/quartic");
  double quad = best_polynomial_error(t, 2, 100000, 20000, o2);
  double quart = best_polynomial_error(t, 4, 100000, 20000, o4);
  bool order = ek > e2 && e2 > e3;
  bool plateau = std::abs(ek - quad) <= 0.15 * quad;
  bool below = e3 < quart;
  std::string d = "kernel " + fmt("%.4f", ek) + " > two-layer " + fmt("%.4f", e2) + " > three-layer " +
                  fmt("%.4f", e3) + (order ? " holds" : " violated") + "; kernel vs best quadratic " +
                  fmt("%.4f", quad) + (plateau ? " within 15%" : " NOT within 15%") + "; three-layer vs best quartic " +
                  fmt("%.4f", quart) + (below ? " below" : " NOT below");
  return {order && plateau && below, d};
}

Outcome double_descent() {
  SweepConfig c = figure_config();
  RngStream tr(c.base_seed, "target");
  Target t = build_target(c.target, tr);
  const long peak = interpolation_peak(c.d);
  KernelSpec k = c.kernel;
  k.lambda_grid = {*std::min_element(c.kernel.lambda_grid.begin(), c.kernel.lambda_grid.end())};
  RngStream te(0, "acceptance/double_descent/test");
  Matrix Xt = gaussian_matrix(te, 5000, c.d);
  Vector yt = eval_target(t, Xt);
  double err[3];
  const long ns[3] = {peak / 2, peak, 2 * peak};
  for (int i = 0; i < 3; ++i) {
    progress("kernel n=" + std::to_string(ns[i]));
    RngStream tr_data(0, "acceptance/double_descent/train/" + std::to_string(ns[i]));
    Matrix X = gaussian_matrix(tr_data, ns[i], c.d);
    err[i] = gen_error(krr_fit_predict(k, X, eval_target(t, X), Xt).predictions, yt).mse;
  }
  bool ok = err[1] > err[0] && err[1] > err[2];
  return {ok, "lambda " + fmt("%.0e", k.lambda_grid[0]) + ": test error n=" + std::to_string(ns[0]) + " " +
                  fmt("%.4g", err[0]) + ", n=" + std::to_string(ns[1]) + " " + fmt("%.4g", err[1]) + ", n=" +
                  std::to_string(ns[2]) + " " + fmt("%.4g", err[2])};
}

Outcome figure5_transition(Runs& runs) {
  Outcome o{true, ""};
  struct Case {
    std::string method;
    SweepConfig cfg;
    long seeds;
  };
  for (const Case& cs : {Case{"three_layer_layerwise", figure_config(), kLayerwiseSeeds},
                         Case{"three_layer_joint", joint_config(), kJointSeeds}}) {
    auto lo = runs.get(cs.cfg, cs.method, 1.2, cs.seeds);
    auto hi = runs.get(cs.cfg, cs.method, 2.0, cs.seeds);
    double mh_lo = median_of(lo, "final", &RunRecord::mh_frob), mh_hi = median_of(hi, "final", &RunRecord::mh_frob);
    double mw_lo = median_of(lo, "final", &RunRecord::mw_frob), mw_hi = median_of(hi, "final", &RunRecord::mw_frob);
    bool ok = mh_hi >= 3.0 * mh_lo && mw_hi >= 2.0 * mw_lo;
    o.pass = o.pass && ok;
    o.detail += cs.method + ": |M_h| " + fmt("%.3g", mh_lo) + " -> " + fmt("%.3g", mh_hi) + " (x" +
                fmt("%.2f", mh_hi / mh_lo) + ", need 3), |M_W| " + fmt("%.3f", mw_lo) + " -> " + fmt("%.3f", mw_hi) +
                " (x" + fmt("%.2f", mw_hi / mw_lo) + ", need 2); ";
  }
  return o;
}

Outcome hierarchical_controls(Runs& runs) {
  const long seeds = 2;
  auto par = runs.get(hierarchical_config("parity"), "three_layer_layerwise", 2.0, seeds);
  auto stc = runs.get(hierarchical_config("staircase"), "three_layer_layerwise", 2.0, seeds);
  Outcome o{true, ""};
  for (long s = 0; s < seeds; ++s) {
    const RunRecord *i0 = nullptr, *f0 = nullptr, *i1 = nullptr, *f1 = nullptr;
    for (const auto& r : par) {
      if (r.seed == s && r.stage == "init") i0 = &r;
      if (r.seed == s && r.stage == "final") f0 = &r;
    }
    for (const auto& r : stc) {
      if (r.seed == s && r.stage == "init") i1 = &r;
      if (r.seed == s && r.stage == "final") f1 = &r;
    }
    if (!i0 || !f0 || !i1 || !f1 || f0->status != "ok" || f1->status != "ok") {
      o.pass = false;
      o.detail += "seed " + std::to_string(s) + " incomplete; ";
      continue;
    }
    double se = std::hypot(i0->mh_frob_se, f0->mh_frob_se);
    bool flat = std::abs(f0->mh_frob - i0->mh_frob) <= 3.0 * se;
    double ratio = f1->per_direction_mh[0] / i1->per_direction_mh[0];
    bool grows = ratio >= 3.0;
    o.pass = o.pass && flat && grows;
    o.detail += "seed " + std::to_string(s) + ": parity |M_h| " + fmt("%.3f", i0->mh_frob) + " -> " +
                fmt("%.3f", f0->mh_frob) + " (3 SE = " + fmt("%.3f", 3.0 * se) + "), staircase h1 column x" +
                fmt("%.2f", ratio) + " (need 3); ";
  }
  return o;
}

Outcome deep_experiment(Runs& runs) {
  SweepConfig c = preset("deep_theorem2");
  double m = median_of(runs.get(c, "deep_precond", c.kappa_grid.front(), c.seeds), "final", &RunRecord::stage2_corr);
  return {m >= 0.7, "median corr(h_{L-1}, h*_L) " + fmt("%.3f", m) + " over " + std::to_string(c.seeds) +
                        " seeds (need >= 0.7)"};
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Outcome determinism() {
  SweepConfig c;
  c.experiment_name = "acceptance_determinism";
  c.d = 16;
  c.target = main_example_spec(16, 4, 3.0);
  c.kappa_grid = {1.2, 1.6};
  c.methods = {"kernel", "two_layer", "three_layer_layerwise", "three_layer_joint"};
  c.seeds = 3;
  c.n_test = 1000;
  c.n_mc_overlap = 500;
  c.p1 = 40;
  c.p2 = 40;
  c.two_layer_p = 8;
  c.schedule.T1 = 20;
  c.schedule.layer2_mode = Layer2Mode::SinglePrecondStep;
  c.schedule.reinit_layer2 = true;
  c.schedule.lambda2_multiplier = 0.1;
  c.joint.T = 50;
  c.activation = Activation::composite_even();
  fs::path root = fs::temp_directory_path() / "mightlab_acceptance_determinism";
  fs::remove_all(root);
  std::vector<std::string> records, summaries;
  for (long threads : {1L, 8L, 1L}) {
    fs::path dir = root / std::to_string(records.size());
    SweepResult r = run_sweep(c, {dir.string(), threads, false});
    if (r.failed) return {false, std::to_string(r.failed) + " cells failed"};
    records.push_back(slurp(r.records_path));
    summaries.push_back(slurp(r.summary_path));
  }
  fs::remove_all(root);
  bool same = records[0] == records[1] && records[0] == records[2] && summaries[0] == summaries[1] &&
              summaries[0] == summaries[2];
  return {same, same ? "records and summary byte-identical across 1, 8 and 1 threads (" +
                           std::to_string(records[0].size()) + " bytes)"
                     : "outputs differ between runs"};
}

}  // namespace

int main() {
  Runs runs;
  struct Item {
    int id;
    const char* name;
    std::function<Outcome()> fn;
  };
  std::vector<Item> items = {
      {1, "property_suite", [] { return property_suite(); }},
      {2, "hermite_composition_scaling", [] { return composition_scaling(); }},
      {3, "stage1_recovery", [&] { return stage1_recovery(runs); }},
      {4, "stage2_recovery", [&] { return stage2_recovery(runs); }},
      {5, "figure4_ordering", [&] { return figure4_ordering(runs); }},
      {6, "double_descent", [] { return double_descent(); }},
      {7, "figure5_transition", [&] { return figure5_transition(runs); }},
      {8, "hierarchical_controls", [&] { return hierarchical_controls(runs); }},
      {9, "deep_single_step", [&] { return deep_experiment(runs); }},
      {10, "determinism", [] { return determinism(); }},
  };
  int failed = 0;
  for (const auto& it : items) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    while (o.detail.size() >= 2 && o.detail.compare(o.detail.size() - 2, 2, "; ") == 0)
      o.detail.resize(o.detail.size() - 2);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %-28s %s  %s [%.0fs]\n", it.id, it.name, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(items.size()) - failed, items.size());
  return failed ? 1 : 0;
}
