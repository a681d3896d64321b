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

#include "mightlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "mightlab/diagnostics.hpp"

namespace mightlab {

namespace fs = std::filesystem;

const std::string& csv_header() {
  static const std::string h =
      "experiment_name,method,d,kappa,n,seed,stage,gen_error,mw_frob,mh_frob,per_direction_mh,train_loss_final,"
      "wall_time_s,status";
  return h;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv_row(const RunRecord& r, bool with_wall_time) {
  std::ostringstream os;
  os << r.experiment_name << ',' << r.method << ',' << r.d << ',' << format_double(r.kappa) << ',' << r.n << ','
     << r.seed << ',' << r.stage << ',' << format_double(r.gen_error) << ',' << format_double(r.mw_frob) << ','
     << format_double(r.mh_frob) << ',';
  for (size_t i = 0; i < r.per_direction_mh.size(); ++i) os << (i ? ";" : "") << format_double(r.per_direction_mh[i]);
  os << ',' << format_double(r.train_loss_final) << ',' << (with_wall_time ? format_double(r.wall_time_s) : "0")
     << ',' << r.status;
  return os.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

namespace {

double parse_field(const std::string& s) { return s.empty() ? std::nan("") : std::strtod(s.c_str(), nullptr); }

RunRecord parse_row(const std::string& line) {
  auto f = split_csv_line(line);
  if (f.size() != 14) throw std::runtime_error("malformed record row: " + line);
  RunRecord r;
  r.experiment_name = f[0];
  r.method = f[1];
  r.d = std::stol(f[2]);
  r.kappa = parse_field(f[3]);
  r.n = std::stol(f[4]);
  r.seed = std::stol(f[5]);
  r.stage = f[6];
  r.gen_error = parse_field(f[7]);
  r.mw_frob = parse_field(f[8]);
  r.mh_frob = parse_field(f[9]);
  std::stringstream ss(f[10]);
  std::string tok;
  while (std::getline(ss, tok, ';'))
    if (!tok.empty()) r.per_direction_mh.push_back(parse_field(tok));
  r.train_loss_final = parse_field(f[11]);
  r.wall_time_s = parse_field(f[12]);
  r.status = f[13];
  return r;
}

struct CellContext {
  const SweepConfig& cfg;
  Target target;
  std::string method;
  double kappa;
  long seed;
  long n;
  std::string label;
  Matrix Xtest;
  Vector ytest;
  Matrix Xmc;
  Matrix hstar_mc;

  RngStream stream(const std::string& what) const { return RngStream(cfg.base_seed, what + "/" + label); }

  RunRecord base(const std::string& stage) const {
    RunRecord r;
    r.experiment_name = cfg.experiment_name;
    r.method = method;
    r.d = cfg.d;
    r.kappa = kappa;
    r.n = n;
    r.seed = seed;
    r.stage = stage;
    return r;
  }

  void measure3(RunRecord& r, const Mlp3Params& m) const {
    r.gen_error = gen_error(forward(m, Xtest).out, ytest).mse;
    r.mw_frob = overlap_mw(m.W1, target.wstar).frob;
    Matrix h2 = forward(m, Xmc).h2;
    RngStream rb = stream("bootstrap/" + method + "/" + r.stage);
    MhResult mh = overlap_mh_from(h2, hstar_mc, true, cfg.mh_bootstrap, &rb);
    r.mh_frob = mh.frob;
    r.per_direction_mh = mh.per_direction;
    r.mh_frob_se = mh.frob_se;
    r.per_direction_mh_se = mh.per_direction_se;
    if (hstar_mc.cols() == 1) {
      auto c = column_correlations(h2, hstar_mc.col(0));
      for (auto& x : c) x = std::abs(x);
      r.stage2_corr = median(c);
    }
  }
};

// Enforces stage order for the layer-wise pipeline.
class StageGuard {
 public:
  explicit StageGuard(bool allow_reorder) : allow_(allow_reorder) {}
  void enter(int stage) {
    if (!allow_ && stage != done_ + 1)
      throw ContractError("stage " + std::to_string(stage) + " requested before stage " + std::to_string(done_ + 1));
    done_ = std::max(done_, stage);
  }

 private:
  bool allow_;
  int done_ = 0;
};

void finalize_timing(RunRecord& r, double secs) { r.wall_time_s = secs; }

std::vector<RunRecord> run_layerwise(CellContext& c) {
  const SweepConfig& cfg = c.cfg;
  std::vector<RunRecord> out;
  const long p1 = cfg.resolved_p1();
  LayerwiseSchedule s = cfg.schedule.resolved(c.n);
  RngStream init = c.stream("init/" + c.method);
  Mlp3Params m = init_three_layer(init, p1, p1, cfg.d, cfg.activation);
  Matrix ustar = ustar_directions(m.W1, c.target.wstar);
  long pool = s.reuse_batches ? std::max({s.n1, s.n2, s.n3}) : 0;
  DataSource data(c.target, c.stream("data"), pool);
  StageGuard guard(cfg.allow_stage_reorder);

  RunRecord r0 = c.base("init");
  c.measure3(r0, m);
  r0.ustar_overlap = median(ustar_overlaps(m.W1, ustar));
  out.push_back(r0);

  guard.enter(1);
  StageReport s1 = spherical_sgd_layer1(m, c.target, s, data, ustar);
  RunRecord r1 = c.base("stage1");
  c.measure3(r1, m);
  r1.train_loss_final = s1.loss;
  r1.ustar_overlap = s1.ustar_overlap_final;
  finalize_timing(r1, s1.wall_time_s);
  out.push_back(r1);

  guard.enter(2);
  RngStream r2rng = c.stream("layer2/" + c.method);
  StageReport s2;
  try {
    s2 = s.layer2_mode == Layer2Mode::SinglePrecondStep ? precond_step_layer2(m, c.target, s, data, r2rng)
                                                        : multi_step_layer2(m, c.target, s, data, r2rng);
  } catch (const TrainingDiverged&) {
    // the stage-2 and final rows are kept so every cell has the same shape
    for (const char* stage : {"stage2", "final"}) {
      RunRecord r = c.base(stage);
      r.mw_frob = r1.mw_frob;
      r.status = "diverged";
      out.push_back(r);
    }
    return out;
  }
  RunRecord r2 = c.base("stage2");
  c.measure3(r2, m);
  r2.train_loss_final = s2.loss;
  r2.ustar_overlap = s1.ustar_overlap_final;
  finalize_timing(r2, s2.wall_time_s);
  out.push_back(r2);

  guard.enter(3);
  StageReport s3 = ridge_readout(m, s, data);
  RunRecord r3 = c.base("final");
  c.measure3(r3, m);
  r3.train_loss_final = s3.loss;
  r3.ustar_overlap = s1.ustar_overlap_final;
  r3.stage2_corr = r2.stage2_corr;
  finalize_timing(r3, s3.wall_time_s);
  out.push_back(r3);
  return out;
}

std::vector<RunRecord> run_joint(CellContext& c) {
  const SweepConfig& cfg = c.cfg;
  std::vector<RunRecord> out;
  RngStream init = c.stream("init/" + c.method);
  Mlp3Params m = init_three_layer_gaussian(init, cfg.resolved_p1(), cfg.p2, cfg.d, cfg.activation);
  RngStream drng = c.stream("data");
  Matrix X = gaussian_matrix(drng, c.n, cfg.d);
  Vector y = eval_target(c.target, X);
  RunRecord r0 = c.base("init");
  c.measure3(r0, m);
  out.push_back(r0);
  RngStream mb = c.stream("minibatch/" + c.method);
  Mlp3Params last_good = m;
  RunRecord r1 = c.base("final");
  auto t0 = std::chrono::steady_clock::now();
  try {
    StageReport s = train_joint(m, X, y, cfg.joint, mb, &last_good);
    c.measure3(r1, m);
    r1.train_loss_final = s.loss;
  } catch (const TrainingDiverged&) {
    c.measure3(r1, last_good);
    r1.train_loss_final = loss_value(forward(last_good, X).out, y, Loss::Square);
    r1.status = "diverged";
  }
  finalize_timing(r1, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  out.push_back(r1);
  return out;
}

std::vector<RunRecord> run_two_layer(CellContext& c) {
  const SweepConfig& cfg = c.cfg;
  std::vector<RunRecord> out;
  RngStream init = c.stream("init/" + c.method);
  Mlp2Params m = init_two_layer(init, cfg.resolved_two_layer_p(), cfg.d, cfg.activation);
  LayerwiseSchedule s = cfg.schedule.resolved(c.n);
  long pool = s.reuse_batches ? std::max({s.n1, s.n3}) : 0;
  DataSource data(c.target, c.stream("data"), pool);
  auto measure = [&](RunRecord& r) {
    r.gen_error = gen_error(forward(m, c.Xtest).out, c.ytest).mse;
    r.mw_frob = overlap_mw(m.W1, c.target.wstar).frob;
  };
  RunRecord r0 = c.base("init");
  measure(r0);
  out.push_back(r0);
  TwoLayerReport rep = train_two_layer(m, c.target, s, data, cfg.resolved_p1());
  RunRecord r1 = c.base("stage1");
  measure(r1);
  r1.train_loss_final = rep.stage1.loss;
  finalize_timing(r1, rep.stage1.wall_time_s);
  out.push_back(r1);
  RunRecord r2 = c.base("final");
  measure(r2);
  r2.train_loss_final = rep.readout.loss;
  finalize_timing(r2, rep.readout.wall_time_s);
  out.push_back(r2);
  return out;
}

std::vector<RunRecord> run_kernel(CellContext& c) {
  const SweepConfig& cfg = c.cfg;
  auto t0 = std::chrono::steady_clock::now();
  const long n = std::min(c.n, cfg.kernel_max_n);
  RngStream drng = c.stream("data");
  Matrix X = gaussian_matrix(drng, n, cfg.d);
  Vector y = eval_target(c.target, X);
  KrrResult k = krr_fit_predict(cfg.kernel, X, y, c.Xtest);
  RunRecord r = c.base("final");
  r.n = n;
  r.gen_error = gen_error(k.predictions, c.ytest).mse;
  finalize_timing(r, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return {r};
}

std::vector<RunRecord> run_deep(CellContext& c) {
  const SweepConfig& cfg = c.cfg;
  auto t0 = std::chrono::steady_clock::now();
  DeepSchedule s = cfg.deep;
  s.n = c.n;
  RngStream rng = c.stream("deep");
  DeepReport rep = deep_precond_experiment(c.target, cfg.activation, s, rng);
  RunRecord r = c.base("final");
  double f = 0.0;
  for (double x : rep.corr) f += x * x;
  r.mh_frob = std::sqrt(f);
  r.per_direction_mh = {r.mh_frob};
  r.stage2_corr = rep.median_corr;
  if (rep.degenerate) r.status = "failed";
  finalize_timing(r, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return {r};
}

std::string cell_label(double kappa, long seed) { return format_double(kappa) + "/" + std::to_string(seed); }

}  // namespace

std::vector<RunRecord> run_single(const SweepConfig& cfg, const std::string& method, double kappa, long seed) {
  cfg.validate();
  RngStream trng(cfg.base_seed, cfg.fixed_teacher ? std::string("target") : "target/" + std::to_string(seed));
  CellContext c{cfg, build_target(cfg.target, trng), method, kappa, seed, cfg.n_for(kappa), cell_label(kappa, seed),
                {}, {}, {}, {}};
  try {
    if (method != "deep_precond") {
      RngStream te = c.stream("test");
      c.Xtest = gaussian_matrix(te, cfg.n_test, cfg.d);
      c.ytest = eval_target(c.target, c.Xtest);
      RngStream mc = c.stream("overlap");
      c.Xmc = gaussian_matrix(mc, cfg.n_mc_overlap, cfg.d);
      c.hstar_mc = hidden_features(c.target, c.Xmc, c.target.spec.depth());
    }
    if (method == "three_layer_layerwise") return run_layerwise(c);
    if (method == "three_layer_joint") return run_joint(c);
    if (method == "two_layer") return run_two_layer(c);
    if (method == "kernel") return run_kernel(c);
    if (method == "deep_precond") return run_deep(c);
    throw SpecError("unknown method " + method);
  } catch (const SpecError&) {
    throw;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "cell %s kappa=%s seed=%ld failed: %s\n", method.c_str(), format_double(kappa).c_str(),
                 seed, e.what());
    RunRecord r = c.base("final");
    r.status = "failed";
    return {r};
  }
}

std::string summary_csv(const std::vector<RunRecord>& rows) {
  struct Acc {
    const RunRecord* first = nullptr;
    long count = 0;
    std::vector<double> ge, mw, mh;
    std::vector<std::vector<double>> pd;
  };
  std::vector<std::string> order;
  std::map<std::string, Acc> acc;
  for (const auto& r : rows) {
    std::string key = r.method + "," + format_double(r.kappa) + "," + r.stage;
    auto it = acc.find(key);
    if (it == acc.end()) {
      order.push_back(key);
      it = acc.emplace(key, Acc{}).first;
      it->second.first = &r;
    }
    if (r.status != "ok") continue;
    Acc& a = it->second;
    ++a.count;
    if (!std::isnan(r.gen_error)) a.ge.push_back(r.gen_error);
    if (!std::isnan(r.mw_frob)) a.mw.push_back(r.mw_frob);
    if (!std::isnan(r.mh_frob)) a.mh.push_back(r.mh_frob);
    if (a.pd.size() < r.per_direction_mh.size()) a.pd.resize(r.per_direction_mh.size());
    for (size_t j = 0; j < r.per_direction_mh.size(); ++j) a.pd[j].push_back(r.per_direction_mh[j]);
  }
  std::ostringstream os;
  os << "experiment_name,method,d,kappa,n,stage,count,gen_error,mw_frob,mh_frob,per_direction_mh\n";
  for (const auto& key : order) {
    const Acc& a = acc.at(key);
    const RunRecord& f = *a.first;
    os << f.experiment_name << ',' << f.method << ',' << f.d << ',' << format_double(f.kappa) << ',' << f.n << ','
       << f.stage << ',' << a.count << ',' << format_double(median(a.ge)) << ',' << format_double(median(a.mw))
       << ',' << format_double(median(a.mh)) << ',';
    for (size_t j = 0; j < a.pd.size(); ++j) os << (j ? ";" : "") << format_double(median(a.pd[j]));
    os << '\n';
  }
  return os.str();
}

SweepResult run_sweep(const SweepConfig& cfg, const SweepOptions& opt) {
  cfg.validate();
  fs::create_directories(opt.out_dir);
  SweepResult res;
  res.records_path = (fs::path(opt.out_dir) / "records.csv").string();
  res.summary_path = (fs::path(opt.out_dir) / "summary.csv").string();
  const std::string partial_path = (fs::path(opt.out_dir) / "records.partial.csv").string();
  const std::string timing_path = (fs::path(opt.out_dir) / "timings.csv").string();

  struct Cell {
    std::string method;
    double kappa;
    long seed;
    std::string key;
  };
  std::vector<Cell> cells;
  for (const auto& m : cfg.methods)
    for (double k : cfg.kappa_grid)
      for (long s = 0; s < cfg.seeds; ++s) cells.push_back({m, k, s, m + "," + format_double(k) + "," + std::to_string(s)});
  res.cells = static_cast<long>(cells.size());

  // rows already on disk, grouped by cell
  std::map<std::string, std::vector<std::string>> previous;
  if (opt.resume) {
    for (const auto& path : {res.records_path, partial_path}) {
      std::ifstream is(path);
      std::string line;
      bool header = true;
      while (std::getline(is, line)) {
        if (header) {
          header = false;
          if (line == csv_header()) continue;
        }
        if (line.empty()) continue;
        RunRecord r;
        try {
          r = parse_row(line);
        } catch (const std::exception&) {
          continue;  // a torn last line from an interrupted run
        }
        if (r.experiment_name != cfg.experiment_name) continue;
        std::string key = r.method + "," + format_double(r.kappa) + "," + std::to_string(r.seed);
        auto& v = previous[key];
        if (std::find(v.begin(), v.end(), line) == v.end()) v.push_back(line);
      }
    }
  }

  std::vector<std::vector<std::string>> out_rows(cells.size());
  std::vector<std::vector<RunRecord>> out_recs(cells.size());
  std::vector<char> todo(cells.size(), 1);
  for (size_t i = 0; i < cells.size(); ++i) {
    auto it = previous.find(cells[i].key);
    if (it == previous.end()) continue;
    bool ok = !it->second.empty();
    std::vector<RunRecord> recs;
    for (const auto& line : it->second) {
      RunRecord r = parse_row(line);
      ok = ok && r.status == "ok";
      recs.push_back(r);
    }
    if (ok) {
      todo[i] = 0;
      out_rows[i] = it->second;
      out_recs[i] = recs;
      ++res.cells_skipped;
    }
  }

  std::ofstream partial(partial_path, opt.resume ? std::ios::app : std::ios::trunc);
  std::mutex io_mutex;
  std::vector<std::string> timing_rows;
  std::atomic<size_t> next{0};
  const long nthreads = std::max<long>(1, opt.threads);
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      if (!todo[i]) continue;
      std::vector<RunRecord> recs;
      try {
        recs = run_single(cfg, cells[i].method, cells[i].kappa, cells[i].seed);
      } catch (const std::exception&) {
        RunRecord r;
        r.experiment_name = cfg.experiment_name;
        r.method = cells[i].method;
        r.d = cfg.d;
        r.kappa = cells[i].kappa;
        r.n = cfg.n_for(cells[i].kappa);
        r.seed = cells[i].seed;
        r.stage = "final";
        r.status = "failed";
        recs = {r};
      }
      std::vector<std::string> rows;
      for (const auto& r : recs) rows.push_back(to_csv_row(r, cfg.record_wall_time));
      std::lock_guard<std::mutex> lock(io_mutex);
      for (const auto& row : rows) partial << row << '\n';
      partial.flush();
      for (const auto& r : recs)
        timing_rows.push_back(r.method + "," + format_double(r.kappa) + "," + std::to_string(r.seed) + "," + r.stage +
                              "," + format_double(r.wall_time_s));
      out_rows[i] = std::move(rows);
      out_recs[i] = std::move(recs);
    }
  };
  std::vector<std::thread> pool;
  for (long t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  partial.close();

  std::vector<RunRecord> all;
  {
    std::ofstream os(res.records_path, std::ios::trunc);
    os << csv_header() << '\n';
    for (size_t i = 0; i < cells.size(); ++i)
      for (const auto& row : out_rows[i]) os << row << '\n';
    if (!os) throw std::runtime_error("cannot write " + res.records_path);
  }
  for (auto& v : out_recs)
    for (auto& r : v) {
      if (r.status == "failed") ++res.failed;
      if (r.status == "diverged") ++res.diverged;
      all.push_back(r);
    }
  {
    std::ofstream os(res.summary_path, std::ios::trunc);
    os << summary_csv(all);
  }
  {
    std::sort(timing_rows.begin(), timing_rows.end());
    std::ofstream os(timing_path, std::ios::trunc);
    os << "method,kappa,seed,stage,wall_time_s\n";
    for (const auto& r : timing_rows) os << r << '\n';
  }
  fs::remove(partial_path);
  return res;
}

}  // namespace mightlab
