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

#include "mightlab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mightlab {

using nlohmann::json;

long SweepConfig::n_for(double kappa) const {
  return std::lround(std::pow(static_cast<double>(d), kappa));
}

long SweepConfig::n_max() const {
  long m = 0;
  for (double k : kappa_grid) m = std::max(m, n_for(k));
  return m;
}

long SweepConfig::resolved_p1() const {
  if (p1 > 0) return p1;
  return std::max<long>(1, static_cast<long>(std::pow(static_cast<double>(n_max()), 0.9)));
}

long SweepConfig::resolved_two_layer_p() const {
  if (two_layer_p > 0) return two_layer_p;
  return std::max<long>(1, resolved_p1() / 25);
}

void SweepConfig::validate() const {
  if (d < 1) throw SpecError("config: d must be >= 1");
  if (target.d != d) throw SpecError("config: target.d must equal d");
  target.validate();
  if (kappa_grid.empty()) throw SpecError("config: kappa_grid is empty");
  for (double k : kappa_grid) {
    if (!(k > 0)) throw SpecError("config: kappa values must be > 0");
    long n = n_for(k);
    if (n < 2) throw SpecError("config: round(d^kappa) must be >= 2");
    if (n > memory_cap_n)
      throw SpecError("config: kappa " + std::to_string(k) + " gives n = " + std::to_string(n) +
                      " above memory_cap_n = " + std::to_string(memory_cap_n));
  }
  if (seeds < 1) throw SpecError("config: seeds must be >= 1");
  if (methods.empty()) throw SpecError("config: no methods");
  for (const auto& m : methods) {
    bool ok = false;
    for (const auto& k : known_methods()) ok = ok || k == m;
    if (!ok) throw SpecError("config: unknown method " + m);
  }
  if (n_test < 1000) throw SpecError("config: n_test must be >= 1000");
  if (n_mc_overlap < 100) throw SpecError("config: n_mc_overlap must be >= 100");
  if (p2 < 1) throw SpecError("config: p2 must be >= 1");
  if (kernel_max_n < 2) throw SpecError("config: kernel_max_n must be >= 2");
  if (kernel.lambda_grid.empty()) throw SpecError("config: kernel.lambda_grid is empty");
  schedule.validate();
}

namespace {

bool same_activation(const Activation& a, const Activation& b) {
  if (a.kind() != b.kind()) return false;
  if (a.kind() == Activation::Kind::Series) return a.series_coeffs() == b.series_coeffs();
  if (a.kind() == Activation::Kind::Mixture) {
    const auto &x = a.mixture_coeffs(), &y = b.mixture_coeffs();
    return x.lin == y.lin && x.logcosh == y.logcosh && x.tanh == y.tanh && x.he3 == y.he3;
  }
  return true;
}

json series_json(const HermiteSeries& s) { return json(s.coeffs); }
HermiteSeries series_from(const json& j) { return HermiteSeries(j.get<std::vector<double>>()); }

json activation_json(const Activation& a) {
  json j;
  j["kind"] = a.name();
  if (a.kind() == Activation::Kind::Series) j["coeffs"] = series_json(a.series_coeffs());
  if (a.kind() == Activation::Kind::Mixture) {
    const auto& m = a.mixture_coeffs();
    j["lin"] = m.lin;
    j["logcosh"] = m.logcosh;
    j["tanh"] = m.tanh;
    j["he3"] = m.he3;
  }
  return j;
}

Activation activation_from(const json& j) {
  std::string k = j.at("kind").get<std::string>();
  if (k == "tanh") return Activation::tanh();
  if (k == "series") return Activation::series(series_from(j.at("coeffs")));
  if (k == "composite_even") return Activation::composite_even();
  if (k == "mixture") {
    MixtureCoeffs m;
    m.lin = j.value("lin", 0.0);
    m.logcosh = j.value("logcosh", 0.0);
    m.tanh = j.value("tanh", 0.0);
    m.he3 = j.value("he3", 0.0);
    return Activation::mixture(m);
  }
  throw SpecError("config: unknown activation kind " + k);
}

json target_json(const TargetSpec& t) {
  json j;
  j["d"] = t.d;
  j["wstar_rows"] = t.wstar_rows;
  json levels = json::array();
  for (const auto& l : t.levels) {
    json lj;
    lj["width"] = l.width;
    lj["poly"] = series_json(l.poly);
    if (!l.block_polys.empty()) {
      json bp = json::array();
      for (const auto& p : l.block_polys) bp.push_back(series_json(p));
      lj["block_polys"] = bp;
    }
    lj["standardize"] = l.standardize;
    levels.push_back(lj);
  }
  j["levels"] = levels;
  json link;
  link["kind"] = to_string(t.link.kind);
  link["scale"] = t.link.scale;
  if (t.link.kind == LinkKind::Custom) link["series"] = series_json(t.link.series);
  j["link"] = link;
  j["weight_dist"] = to_string(t.weight_dist);
  return j;
}

TargetSpec target_from(const json& j) {
  TargetSpec t;
  t.d = j.at("d").get<long>();
  t.wstar_rows = j.at("wstar_rows").get<long>();
  for (const auto& lj : j.at("levels")) {
    LevelSpec l;
    l.width = lj.at("width").get<long>();
    if (lj.contains("poly")) l.poly = series_from(lj.at("poly"));
    if (lj.contains("block_polys"))
      for (const auto& p : lj.at("block_polys")) l.block_polys.push_back(series_from(p));
    l.standardize = lj.value("standardize", false);
    t.levels.push_back(l);
  }
  const json& link = j.at("link");
  t.link.kind = link_from_string(link.at("kind").get<std::string>());
  t.link.scale = link.value("scale", 1.0);
  if (link.contains("series")) t.link.series = series_from(link.at("series"));
  t.weight_dist = weight_dist_from_string(j.value("weight_dist", std::string("all_ones")));
  return t;
}

json schedule_json(const LayerwiseSchedule& s) {
  json j;
  j["T1"] = s.T1;
  j["n1"] = s.n1;
  j["eta1_prefactor"] = s.eta1_prefactor;
  j["n2"] = s.n2;
  j["eta2_prefactor"] = s.eta2_prefactor;
  j["lambda2_multiplier"] = s.lambda2_multiplier;
  j["n3"] = s.n3;
  j["ridge_lambda_grid"] = s.ridge_lambda_grid;
  j["reuse_batches"] = s.reuse_batches;
  j["reinit_layer2"] = s.reinit_layer2;
  j["layer2_mode"] = to_string(s.layer2_mode);
  j["multi_step_T2"] = s.multi_step_T2;
  j["multi_step_lr"] = s.multi_step_lr;
  j["p2_reinit"] = s.p2_reinit;
  return j;
}

LayerwiseSchedule schedule_from(const json& j) {
  LayerwiseSchedule s;
  s.T1 = j.value("T1", s.T1);
  s.n1 = j.value("n1", s.n1);
  s.eta1_prefactor = j.value("eta1_prefactor", s.eta1_prefactor);
  s.n2 = j.value("n2", s.n2);
  s.eta2_prefactor = j.value("eta2_prefactor", s.eta2_prefactor);
  s.lambda2_multiplier = j.value("lambda2_multiplier", s.lambda2_multiplier);
  s.n3 = j.value("n3", s.n3);
  if (j.contains("ridge_lambda_grid")) s.ridge_lambda_grid = j.at("ridge_lambda_grid").get<std::vector<double>>();
  s.reuse_batches = j.value("reuse_batches", s.reuse_batches);
  s.reinit_layer2 = j.value("reinit_layer2", s.reinit_layer2);
  if (j.contains("layer2_mode")) s.layer2_mode = layer2_mode_from_string(j.at("layer2_mode").get<std::string>());
  s.multi_step_T2 = j.value("multi_step_T2", s.multi_step_T2);
  s.multi_step_lr = j.value("multi_step_lr", s.multi_step_lr);
  s.p2_reinit = j.value("p2_reinit", s.p2_reinit);
  return s;
}

json to_json(const SweepConfig& c) {
  json j;
  j["experiment_name"] = c.experiment_name;
  j["d"] = c.d;
  j["target"] = target_json(c.target);
  j["kappa_grid"] = c.kappa_grid;
  j["methods"] = c.methods;
  j["seeds"] = c.seeds;
  j["n_test"] = c.n_test;
  j["n_mc_overlap"] = c.n_mc_overlap;
  j["mh_bootstrap"] = c.mh_bootstrap;
  j["base_seed"] = c.base_seed;
  j["threads"] = c.threads;
  j["p1"] = c.p1;
  j["p2"] = c.p2;
  j["two_layer_p"] = c.two_layer_p;
  j["activation"] = activation_json(c.activation);
  j["schedule"] = schedule_json(c.schedule);
  json jj;
  jj["T"] = c.joint.T;
  jj["minibatch_fraction"] = c.joint.minibatch_fraction;
  jj["lr_w1"] = c.joint.lr_w1;
  jj["lr_w2"] = c.joint.lr_w2;
  jj["lr_w3"] = c.joint.lr_w3;
  j["joint"] = jj;
  json kj;
  kj["kind"] = "quadratic";
  kj["c"] = c.kernel.c;
  kj["lambda_grid"] = c.kernel.lambda_grid;
  j["kernel"] = kj;
  json dj;
  dj["p"] = c.deep.p;
  dj["p_next"] = c.deep.p_next;
  dj["eta_prefactor"] = c.deep.eta_prefactor;
  dj["lambda_multiplier"] = c.deep.lambda_multiplier;
  dj["n_eval"] = c.deep.n_eval;
  j["deep"] = dj;
  j["kernel_max_n"] = c.kernel_max_n;
  j["memory_cap_n"] = c.memory_cap_n;
  j["fixed_teacher"] = c.fixed_teacher;
  j["record_wall_time"] = c.record_wall_time;
  j["allow_stage_reorder"] = c.allow_stage_reorder;
  j["notes"] = c.notes;
  return j;
}

// Writes JSON with every float at 17 significant digits.
void dump17(const json& j, std::ostringstream& os, int indent) {
  std::string pad(static_cast<size_t>(indent) * 2, ' ');
  std::string pad_in(static_cast<size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        break;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad_in << json(it.key()).dump() << ": ";
        dump17(it.value(), os, indent + 1);
      }
      os << "\n" << pad << "}";
      break;
    }
    case json::value_t::array: {
      bool scalars = true;
      for (const auto& e : j) scalars = scalars && !e.is_structured();
      if (j.empty()) {
        os << "[]";
      } else if (scalars) {
        os << "[";
        for (size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          dump17(j[i], os, indent + 1);
        }
        os << "]";
      } else {
        os << "[\n";
        for (size_t i = 0; i < j.size(); ++i) {
          if (i) os << ",\n";
          os << pad_in;
          dump17(j[i], os, indent + 1);
        }
        os << "\n" << pad << "]";
      }
      break;
    }
    case json::value_t::number_float: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
      std::string s = buf;
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      os << s;
      break;
    }
    default:
      os << j.dump();
  }
}

}  // namespace

bool operator==(const SweepConfig& a, const SweepConfig& b) {
  return to_json(a) == to_json(b) && same_activation(a.activation, b.activation);
}

std::string config_to_json(const SweepConfig& c) {
  std::ostringstream os;
  dump17(to_json(c), os, 0);
  os << "\n";
  return os.str();
}

SweepConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SpecError(std::string("config: JSON parse error: ") + e.what());
  }
  try {
    SweepConfig c;
    c.experiment_name = j.at("experiment_name").get<std::string>();
    c.d = j.at("d").get<long>();
    c.target = target_from(j.at("target"));
    c.kappa_grid = j.at("kappa_grid").get<std::vector<double>>();
    c.methods = j.at("methods").get<std::vector<std::string>>();
    c.seeds = j.value("seeds", c.seeds);
    c.n_test = j.value("n_test", c.n_test);
    c.n_mc_overlap = j.value("n_mc_overlap", c.n_mc_overlap);
    c.mh_bootstrap = j.value("mh_bootstrap", c.mh_bootstrap);
    c.base_seed = j.value("base_seed", c.base_seed);
    c.threads = j.value("threads", c.threads);
    c.p1 = j.value("p1", c.p1);
    c.p2 = j.value("p2", c.p2);
    c.two_layer_p = j.value("two_layer_p", c.two_layer_p);
    if (j.contains("activation")) c.activation = activation_from(j.at("activation"));
    if (j.contains("schedule")) c.schedule = schedule_from(j.at("schedule"));
    if (j.contains("joint")) {
      const json& jj = j.at("joint");
      c.joint.T = jj.value("T", c.joint.T);
      c.joint.minibatch_fraction = jj.value("minibatch_fraction", c.joint.minibatch_fraction);
      c.joint.lr_w1 = jj.value("lr_w1", c.joint.lr_w1);
      c.joint.lr_w2 = jj.value("lr_w2", c.joint.lr_w2);
      c.joint.lr_w3 = jj.value("lr_w3", c.joint.lr_w3);
    }
    if (j.contains("kernel")) {
      const json& kj = j.at("kernel");
      if (kj.value("kind", std::string("quadratic")) != "quadratic") throw SpecError("config: only the quadratic kernel exists");
      c.kernel.c = kj.value("c", c.kernel.c);
      if (kj.contains("lambda_grid")) c.kernel.lambda_grid = kj.at("lambda_grid").get<std::vector<double>>();
    }
    if (j.contains("deep")) {
      const json& dj = j.at("deep");
      c.deep.p = dj.value("p", c.deep.p);
      c.deep.p_next = dj.value("p_next", c.deep.p_next);
      c.deep.eta_prefactor = dj.value("eta_prefactor", c.deep.eta_prefactor);
      c.deep.lambda_multiplier = dj.value("lambda_multiplier", c.deep.lambda_multiplier);
      c.deep.n_eval = dj.value("n_eval", c.deep.n_eval);
    }
    c.kernel_max_n = j.value("kernel_max_n", c.kernel_max_n);
    c.memory_cap_n = j.value("memory_cap_n", c.memory_cap_n);
    c.fixed_teacher = j.value("fixed_teacher", c.fixed_teacher);
    c.record_wall_time = j.value("record_wall_time", c.record_wall_time);
    c.allow_stage_reorder = j.value("allow_stage_reorder", c.allow_stage_reorder);
    c.notes = j.value("notes", std::string());
    return c;
  } catch (const json::exception& e) {
    throw SpecError(std::string("config: ") + e.what());
  }
}

SweepConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return config_from_json(ss.str());
}

void save_config(const SweepConfig& c, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write config " + path);
  os << config_to_json(c);
  if (!os) throw std::runtime_error("write failed for " + path);
}

namespace {

SweepConfig main_example_base(const std::string& name) {
  SweepConfig c;
  c.experiment_name = name;
  c.d = 64;
  c.target = main_example_spec(64, 8, 3.0);
  c.seeds = 20;
  c.n_test = 10000;
  c.p2 = 600;
  c.activation = Activation::composite_even();
  c.schedule.T1 = static_cast<long>(15.0 * std::log(64.0));
  c.schedule.eta2_prefactor = 2.0;
  c.schedule.multi_step_T2 = static_cast<long>(5.0 * std::pow(64.0, 1.5));
  c.schedule.multi_step_lr = 2.0;
  c.schedule.layer2_mode = Layer2Mode::MultiStepReuse;
  c.joint.T = static_cast<long>(5.0 * std::pow(64.0, 1.5));
  c.joint.lr_w1 = c.joint.lr_w2 = c.joint.lr_w3 = 0.2;
  // Stage 2 is one preconditioned step on a layer reinitialized at zero: the
  // multi-step variant either stalls (tanh) or diverges (composite) at d = 64.
  c.schedule.layer2_mode = Layer2Mode::SinglePrecondStep;
  c.schedule.reinit_layer2 = true;
  c.schedule.p2_reinit = c.p2;
  c.schedule.lambda2_multiplier = 0.1;
  c.schedule.eta2_prefactor = 1.0 / std::sqrt(static_cast<double>(c.p2));
  return c;
}

// Effective stage-1 rate 0.5 for widths (p1, 8).
void set_stage1_rate(SweepConfig& c) {
  c.schedule.eta1_prefactor = 0.5 / std::sqrt(static_cast<double>(c.resolved_p1() * c.target.wstar_rows));
}

TargetSpec might_spec(long d, long wstar_rows, long r, LinkKind link) {
  TargetSpec t;
  t.d = d;
  t.wstar_rows = wstar_rows;
  LevelSpec l;
  l.width = r;
  l.poly = HermiteSeries({0.0, 0.0, 1.0, 1.0});
  l.standardize = true;
  t.levels.push_back(l);
  t.link.kind = link;
  t.link.scale = 1.0;
  return t;
}

}  // namespace

SweepConfig preset(const std::string& name) {
  if (name == "figure4") {
    SweepConfig c = main_example_base(name);
    c.kappa_grid = {1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.4};
    c.methods = {"kernel", "two_layer", "three_layer_layerwise", "three_layer_joint"};
    c.notes = "kappa grid endpoints [1.0, 2.4] are a design choice";
    set_stage1_rate(c);
    return c;
  }
  if (name == "figure5") {
    SweepConfig c = main_example_base(name);
    c.kappa_grid = {1.0, 1.2, 1.4, 1.5, 1.6, 1.8, 2.0};
    c.methods = {"three_layer_layerwise", "three_layer_joint"};
    c.notes = "overlap order parameters versus kappa; d = 64 is a design choice";
    set_stage1_rate(c);
    return c;
  }
  if (name == "ablation_reinit") {
    SweepConfig c = main_example_base(name);
    c.kappa_grid = {1.0, 1.2, 1.4, 1.6, 1.8, 2.0};
    c.methods = {"three_layer_layerwise"};
    c.schedule.reinit_layer2 = false;
    c.schedule.p2_reinit = 0;
    c.notes = "layer 2 keeps its identity initialization before its update; compare against figure4 layerwise rows";
    set_stage1_rate(c);
    return c;
  }
  if (name == "ablation_reuse") {
    SweepConfig c = main_example_base(name);
    c.kappa_grid = {1.0, 1.2, 1.4, 1.6, 1.8, 2.0};
    c.methods = {"three_layer_layerwise"};
    c.schedule.reuse_batches = true;
    c.notes = "one batch of size n serves every stage; compare against figure4 layerwise rows";
    set_stage1_rate(c);
    return c;
  }
  if (name == "parity") {
    SweepConfig c = main_example_base(name);
    c.target = might_spec(64, 24, 3, LinkKind::ParitySign);
    c.kappa_grid = {2.0};
    c.methods = {"three_layer_layerwise", "three_layer_joint"};
    c.mh_bootstrap = 200;
    c.notes = "y = sign(h1 h2 h3), three blocks of width 8";
    set_stage1_rate(c);
    return c;
  }
  if (name == "staircase") {
    SweepConfig c = main_example_base(name);
    c.target = might_spec(64, 16, 2, LinkKind::Staircase);
    c.kappa_grid = {2.0};
    c.methods = {"three_layer_layerwise", "three_layer_joint"};
    c.mh_bootstrap = 200;
    c.notes = "y = h1 + h1 h2, two blocks of width 8";
    set_stage1_rate(c);
    return c;
  }
  if (name == "deep_theorem2") {
    SweepConfig c;
    c.experiment_name = name;
    c.d = 256;
    c.target.d = 256;
    c.target.wstar_rows = 16;
    LevelSpec a;
    a.width = 4;
    a.poly = HermiteSeries({0.0, 0.0, 1.0, 1.0});
    a.standardize = true;
    LevelSpec b = a;
    b.width = 1;
    c.target.levels = {a, b};
    c.target.link.kind = LinkKind::TanhSum;
    c.target.link.scale = 1.0;
    // batch = 4^(3 * 1.1) = 256^0.825
    c.kappa_grid = {0.825};
    c.methods = {"deep_precond"};
    c.seeds = 20;
    c.activation = Activation::composite_even();
    c.deep.p = 128;
    c.deep.p_next = 16;
    c.deep.lambda_multiplier = 0.1;
    c.notes = "widths (16, 4, 1) on d = 256 with exact access to the level-2 features";
    return c;
  }
  throw SpecError("unknown preset: " + name);
}

}  // namespace mightlab
