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

#include "mightlab/training.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

namespace mightlab {

std::string to_string(Layer2Mode m) {
  return m == Layer2Mode::SinglePrecondStep ? "single_precond_step" : "multi_step_reuse";
}

Layer2Mode layer2_mode_from_string(const std::string& s) {
  if (s == "single_precond_step") return Layer2Mode::SinglePrecondStep;
  if (s == "multi_step_reuse") return Layer2Mode::MultiStepReuse;
  throw std::invalid_argument("unknown layer2_mode: " + s);
}

LayerwiseSchedule LayerwiseSchedule::resolved(long n) const {
  LayerwiseSchedule s = *this;
  if (s.n1 <= 0) s.n1 = n;
  if (s.n2 <= 0) s.n2 = n;
  if (s.n3 <= 0) s.n3 = n;
  return s;
}

void LayerwiseSchedule::validate() const {
  if (T1 < 0 || multi_step_T2 < 0) throw std::invalid_argument("schedule: step counts must be >= 0");
  if (ridge_lambda_grid.empty()) throw std::invalid_argument("schedule: ridge_lambda_grid is empty");
  if (lambda2_multiplier < 0) throw std::invalid_argument("schedule: lambda2_multiplier must be >= 0");
}

DataSource::DataSource(const Target& t, RngStream rng, long pool_size)
    : t_(t), rng_(std::move(rng)), pool_size_(pool_size) {
  if (pool_size_ > 0) {
    pool_x_ = gaussian_matrix(rng_, pool_size_, t_.spec.d);
    pool_y_ = eval_target(t_, pool_x_);
  }
}

std::pair<Matrix, Vector> DataSource::draw(long n) {
  if (pool_size_ > 0) {
    if (n > pool_size_) throw std::invalid_argument("DataSource: request exceeds the reused batch");
    return {pool_x_.topRows(n), pool_y_.head(n)};
  }
  Matrix X = gaussian_matrix(rng_, n, t_.spec.d);
  Vector y = eval_target(t_, X);
  return {std::move(X), std::move(y)};
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool is_identity(const Matrix& W) {
  if (W.rows() != W.cols()) return false;
  for (long i = 0; i < W.rows(); ++i)
    for (long j = 0; j < W.cols(); ++j)
      if (W(i, j) != (i == j ? 1.0 : 0.0)) return false;
  return true;
}

void check_finite(const Matrix& M, const char* what) {
  if (!M.allFinite()) throw TrainingDiverged(std::string("non-finite values in ") + what);
}

// Correlation-loss gradient of layer 2 at the current W2, plus the loss.
Matrix layer2_corr_grad(const Mlp3Params& m, const Matrix& Z, const Vector& y, double* loss) {
  const double n = static_cast<double>(y.size());
  Matrix h2 = Z * m.W2.transpose();
  h2.rowwise() += m.b2.transpose();
  if (loss) {
    Vector out = m.act.apply(h2) * m.w3;
    out.array() += m.b3;
    *loss = -out.dot(y) / n;
  }
  Matrix d2 = ((-y / n) * m.w3.transpose()).cwiseProduct(m.act.deriv(h2));
  return d2.transpose() * Z;
}

void reinit_layer2(Mlp3Params& m, const LayerwiseSchedule& s, RngStream& rng) {
  long p2 = s.p2_reinit > 0 ? s.p2_reinit : m.p1();
  m.W2 = Matrix::Zero(p2, m.p1());
  m.b2 = Vector::Zero(p2);
  m.w3 = gaussian_vector(rng, p2);
}

Matrix first_layer_features(const Mlp3Params& m, const Matrix& X) {
  Matrix h1 = X * m.W1.transpose();
  h1.rowwise() += m.b1.transpose();
  return m.act.apply(h1);
}

thread_local bool skip_renormalization = false;

void sphere_step(Matrix& W, const Matrix& G, double eta) {
  for (long i = 0; i < W.rows(); ++i) {
    auto w = W.row(i);
    Eigen::RowVectorXd g = G.row(i);
    g -= g.dot(w) * w;
    w -= eta * g;
    if (!skip_renormalization) w /= w.norm();
  }
}

}  // namespace

namespace testing {
void set_skip_renormalization(bool on) { skip_renormalization = on; }
}  // namespace testing

Matrix ustar_directions(const Matrix& W1, const Matrix& wstar) {
  Matrix U = (W1 * wstar.transpose()) * wstar;
  for (long i = 0; i < U.rows(); ++i) {
    double nr = U.row(i).norm();
    if (nr > 0) U.row(i) /= nr;
  }
  return U;
}

std::vector<double> ustar_overlaps(const Matrix& W1, const Matrix& ustar) {
  std::vector<double> o(W1.rows());
  for (long i = 0; i < W1.rows(); ++i) o[i] = std::abs(W1.row(i).dot(ustar.row(i)));
  return o;
}

double eta1_of(const LayerwiseSchedule& s, long p2, long width) {
  return s.eta1_prefactor * std::sqrt(static_cast<double>(p2) * static_cast<double>(width));
}

StageReport spherical_sgd_layer1(Mlp3Params& m, const Target& t, const LayerwiseSchedule& s, DataSource& data,
                                 const Matrix& ustar, bool allow_any_init) {
  auto t0 = Clock::now();
  const bool w2_identity = is_identity(m.W2);
  if (!allow_any_init && (!w2_identity || !(m.w3.array() == 1.0).all()))
    throw ContractError("spherical_sgd_layer1: model is not at the layer-wise initialization");
  StageReport r;
  r.stage = "stage1";
  r.ustar_overlap_init = median(ustar_overlaps(m.W1, ustar));
  const double eta = eta1_of(s, m.p2(), t.spec.wstar_rows);
  for (long step = 0; step < s.T1; ++step) {
    auto [X, y] = data.draw(s.n1);
    Matrix G;
    if (w2_identity && m.b2.isZero(0.0)) {
      // with W2 = I the network is a sum of sigma(sigma(.)) units
      const double n = static_cast<double>(y.size());
      Matrix h1 = X * m.W1.transpose();
      h1.rowwise() += m.b1.transpose();
      Matrix z1 = m.act.apply(h1);
      Vector out = m.act.apply(z1) * m.w3;
      out.array() += m.b3;
      r.loss = -out.dot(y) / n;
      Matrix d1 = ((-y / n) * m.w3.transpose()).cwiseProduct(m.act.deriv(z1)).cwiseProduct(m.act.deriv(h1));
      G = d1.transpose() * X;
    } else {
      Grad3 g = backward(m, X, y, Loss::Correlation);
      r.loss = g.loss;
      G = std::move(g.W1);
    }
    check_finite(G, "layer-1 gradient");
    sphere_step(m.W1, G, eta);
    r.loss_history.push_back(r.loss);
  }
  r.ustar_overlap_final = median(ustar_overlaps(m.W1, ustar));
  r.wall_time_s = seconds_since(t0);
  return r;
}

StageReport precond_step_layer2(Mlp3Params& m, const Target&, const LayerwiseSchedule& s, DataSource& data,
                                RngStream& rng) {
  auto t0 = Clock::now();
  if (s.reinit_layer2) reinit_layer2(m, s, rng);
  auto [X, y] = data.draw(s.n2);
  const double n = static_cast<double>(s.n2);
  Matrix Z = first_layer_features(m, X);
  Matrix G = layer2_corr_grad(m, Z, y, nullptr);
  Matrix C = Z.transpose() * Z / n;
  const double lambda2 = s.lambda2_multiplier * static_cast<double>(m.p1()) / n;
  const double eta2 = s.eta2_prefactor * std::sqrt(static_cast<double>(m.p2()));
  Matrix step = solve_spd(C, G.transpose(), lambda2).transpose();
  m.W2 -= eta2 * step;
  check_finite(m.W2, "layer-2 weights");
  StageReport r;
  r.stage = "stage2";
  layer2_corr_grad(m, Z, y, &r.loss);
  r.loss_history.push_back(r.loss);
  r.wall_time_s = seconds_since(t0);
  return r;
}

StageReport multi_step_layer2(Mlp3Params& m, const Target&, const LayerwiseSchedule& s, DataSource& data,
                              RngStream& rng) {
  auto t0 = Clock::now();
  if (s.reinit_layer2) reinit_layer2(m, s, rng);
  auto [X, y] = data.draw(s.n2);
  Matrix Z = first_layer_features(m, X);
  StageReport r;
  r.stage = "stage2";
  for (long step = 0; step < s.multi_step_T2; ++step) {
    double loss = 0.0;
    Matrix G = layer2_corr_grad(m, Z, y, &loss);
    check_finite(G, "layer-2 gradient");
    m.W2 -= s.multi_step_lr * G;
    r.loss_history.push_back(loss);
  }
  layer2_corr_grad(m, Z, y, &r.loss);
  if (!std::isfinite(r.loss) || std::abs(r.loss) > 1e6) throw TrainingDiverged("layer-2 steps diverged");
  r.wall_time_s = seconds_since(t0);
  return r;
}

RidgeFit ridge_fit(const Matrix& H, const Vector& y, double lambda) {
  const double n = static_cast<double>(H.rows());
  Eigen::RowVectorXd mu = H.colwise().mean();
  const double ym = y.mean();
  Matrix Hc = H.rowwise() - mu;
  Vector yc = y.array() - ym;
  Matrix A = Hc.transpose() * Hc / n;
  Matrix b = Hc.transpose() * yc / n;
  RidgeFit f;
  f.w = solve_spd(A, b, lambda).col(0);
  f.intercept = ym - mu.dot(f.w);
  f.lambda = lambda;
  return f;
}

RidgeFit ridge_select(const Matrix& H, const Vector& y, const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("ridge_select: empty grid");
  const long n = H.rows();
  const long ntr = std::max<long>(2, (8 * n) / 10);
  double best_lambda = grid.front();
  if (grid.size() > 1 && ntr < n) {
    Matrix Htr = H.topRows(ntr), Hva = H.bottomRows(n - ntr);
    Vector ytr = y.head(ntr), yva = y.tail(n - ntr);
    double best = INFINITY;
    for (double lam : grid) {
      RidgeFit f = ridge_fit(Htr, ytr, lam);
      Vector pred = Hva * f.w;
      pred.array() += f.intercept;
      double err = (pred - yva).squaredNorm();
      if (err < best) {
        best = err;
        best_lambda = lam;
      }
    }
  }
  return ridge_fit(H, y, best_lambda);
}

StageReport ridge_readout(Mlp3Params& m, const LayerwiseSchedule& s, DataSource& data) {
  auto t0 = Clock::now();
  auto [X, y] = data.draw(s.n3);
  Forward3 f = forward(m, X);
  RidgeFit fit = ridge_select(f.z2, y, s.ridge_lambda_grid);
  m.w3 = fit.w;
  m.b3 = fit.intercept;
  StageReport r;
  r.stage = "stage3";
  Vector pred = f.z2 * m.w3;
  pred.array() += m.b3;
  r.loss = loss_value(pred, y, Loss::Square);
  r.loss_history.push_back(r.loss);
  r.wall_time_s = seconds_since(t0);
  return r;
}

Matrix precond_dual_preactivations(const Mlp3Params& m, const Matrix& Xtrain, const Vector& ytrain,
                                   const Matrix& Xeval, double eta2, double lambda2) {
  const double n = static_cast<double>(Xtrain.rows());
  Matrix Z = first_layer_features(m, Xtrain);
  Matrix C = Z.transpose() * Z / n;
  Matrix v = solve_spd(C, Z.transpose() * ytrain / n, lambda2);
  Vector g = first_layer_features(m, Xeval) * v.col(0);
  return (eta2 * m.act.df(0.0)) * g * m.w3.transpose();
}

StageReport train_joint(Mlp3Params& m, const Matrix& X, const Vector& y, const JointSchedule& s, RngStream& rng,
                        Mlp3Params* last_good) {
  auto t0 = Clock::now();
  StageReport r;
  r.stage = "joint";
  const long n = X.rows();
  const long nb = std::max<long>(1, static_cast<long>(s.minibatch_fraction * static_cast<double>(n)));
  std::vector<long> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Matrix Xb(nb, X.cols());
  Vector yb(nb);
  for (long step = 0; step < s.T; ++step) {
    // partial Fisher-Yates: first nb entries form a sample without replacement
    for (long i = 0; i < nb; ++i) {
      long j = i + static_cast<long>(rng.below(static_cast<uint64_t>(n - i)));
      std::swap(idx[i], idx[j]);
      Xb.row(i) = X.row(idx[i]);
      yb[i] = y[idx[i]];
    }
    Grad3 g = backward(m, Xb, yb, Loss::Square);
    if (!std::isfinite(g.loss) || g.loss > 1e6 || !g.W1.allFinite() || !g.W2.allFinite())
      throw TrainingDiverged("joint training diverged at step " + std::to_string(step));
    if (last_good) *last_good = m;
    m.W1 -= s.lr_w1 * g.W1;
    m.b1 -= s.lr_w1 * g.b1;
    m.W2 -= s.lr_w2 * g.W2;
    m.b2 -= s.lr_w2 * g.b2;
    m.w3 -= s.lr_w3 * g.w3;
    m.b3 -= s.lr_w3 * g.b3;
    r.loss = g.loss;
    if (s.snapshot_every > 0 && step % s.snapshot_every == 0) r.loss_history.push_back(g.loss);
  }
  r.loss = loss_value(forward(m, X).out, y, Loss::Square);
  if (!std::isfinite(r.loss) || r.loss > 1e6) throw TrainingDiverged("joint training diverged at the end");
  r.wall_time_s = seconds_since(t0);
  return r;
}

TwoLayerReport train_two_layer(Mlp2Params& m, const Target& t, const LayerwiseSchedule& s, DataSource& data,
                               long p2_for_step) {
  TwoLayerReport rep;
  auto t0 = Clock::now();
  rep.stage1.stage = "stage1";
  const double eta = eta1_of(s, p2_for_step, t.spec.wstar_rows);
  for (long step = 0; step < s.T1; ++step) {
    auto [X, y] = data.draw(s.n1);
    Grad2 g = backward(m, X, y, Loss::Correlation);
    check_finite(g.W1, "layer-1 gradient");
    sphere_step(m.W1, g.W1, eta);
    rep.stage1.loss = g.loss;
    rep.stage1.loss_history.push_back(g.loss);
  }
  rep.stage1.wall_time_s = seconds_since(t0);
  t0 = Clock::now();
  auto [X, y] = data.draw(s.n3);
  Forward2 f = forward(m, X);
  RidgeFit fit = ridge_select(f.z1, y, s.ridge_lambda_grid);
  m.w2 = fit.w;
  m.b2 = fit.intercept;
  Vector pred = f.z1 * m.w2;
  pred.array() += m.b2;
  rep.readout.stage = "readout";
  rep.readout.loss = loss_value(pred, y, Loss::Square);
  rep.readout.wall_time_s = seconds_since(t0);
  return rep;
}

DeepReport deep_precond_experiment(const Target& t, const Activation& act, const DeepSchedule& s, RngStream& rng) {
  const long L = t.spec.depth();
  if (L < 3) throw SpecError("deep_precond_experiment: target depth must be >= 3");
  if (t.spec.r() != 1) throw SpecError("deep_precond_experiment: target must have r = 1");
  const long wprev = t.level_width(L - 1);
  RngStream rd = rng.child("data");
  RngStream rw = rng.child("init");
  auto sample = [&](long n, Matrix& Hprev, Vector& hL, Vector& y) {
    Matrix Z1 = gaussian_matrix(rd, n, t.spec.wstar_rows);
    Hprev = features_from_latent(t, Z1, L - 1);
    Matrix HL = features_from_latent(t, Z1, L);
    hL = HL.col(0);
    y = apply_link(t, HL);
  };
  Matrix W = sphere_rows(rw, s.p, wprev);
  Vector w_last = gaussian_vector(rw, s.p_next);
  Matrix Hprev;
  Vector hL, y;
  sample(s.n, Hprev, hL, y);
  const double n = static_cast<double>(s.n);
  Matrix Z = act.apply(Matrix(Hprev * W.transpose()));
  // gradient of the correlation loss at W_{L-1} = 0
  Matrix G = -(act.df(0.0) / n) * w_last * (y.transpose() * Z);
  const double lambda = s.lambda_multiplier * static_cast<double>(s.p) / n;
  const double eta = s.eta_prefactor * std::sqrt(static_cast<double>(s.p_next));
  Matrix Wnext = -eta * solve_spd(Z.transpose() * Z / n, G.transpose(), lambda).transpose();

  Matrix He;
  Vector hLe, ye;
  sample(s.n_eval, He, hLe, ye);
  Matrix h = act.apply(Matrix(He * W.transpose())) * Wnext.transpose();
  DeepReport rep;
  auto centered = [](const Vector& v) { return Vector(v.array() - v.mean()); };
  Vector hc = centered(hLe);
  double sh = hc.norm();
  for (long i = 0; i < h.cols(); ++i) {
    Vector c = centered(h.col(i));
    double denom = c.norm() * sh;
    if (!(denom > 1e-300)) {
      rep.degenerate = true;
      rep.corr.push_back(std::nan(""));
    } else {
      rep.corr.push_back(std::abs(c.dot(hc)) / denom);
    }
  }
  rep.median_corr = rep.degenerate ? std::nan("") : median(rep.corr);
  return rep;
}

}  // namespace mightlab
