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

#include "mightlab/verify.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "mightlab/diagnostics.hpp"
#include "mightlab/hermite.hpp"
#include "mightlab/models.hpp"
#include "mightlab/targets.hpp"
#include "mightlab/training.hpp"

namespace mightlab {

namespace {

// Dense Gauss-Jordan with partial pivoting; kept separate from the
// factorizations it checks.
Matrix gauss_jordan_solve(Matrix A, Matrix B) {
  const long n = A.rows();
  for (long c = 0; c < n; ++c) {
    long piv = c;
    for (long r = c + 1; r < n; ++r)
      if (std::abs(A(r, c)) > std::abs(A(piv, c))) piv = r;
    A.row(c).swap(A.row(piv));
    B.row(c).swap(B.row(piv));
    double d = A(c, c);
    A.row(c) /= d;
    B.row(c) /= d;
    for (long r = 0; r < n; ++r) {
      if (r == c) continue;
      double f = A(r, c);
      if (f == 0.0) continue;
      A.row(r) -= f * A.row(c);
      B.row(r) -= f * B.row(c);
    }
  }
  return B;
}

double hermite_orthonormality() {
  QuadratureRule q = gauss_hermite(12);
  double worst = 0.0;
  for (int j = 0; j <= 10; ++j)
    for (int k = 0; k <= 10; ++k) {
      double v = q.integrate([&](double z) { return he_eval(j, z) * he_eval(k, z); });
      worst = std::max(worst, std::abs(v - (j == k ? 1.0 : 0.0)));
    }
  return worst;
}

double wstar_orthonormality() {
  double worst = 0.0;
  const long shapes[][2] = {{8, 64}, {64, 256}, {256, 1024}};
  for (const auto& s : shapes) {
    RngStream rng(11, "verify/wstar/" + std::to_string(s[1]));
    Matrix W = sample_orthonormal_rows(rng, s[0], s[1]);
    worst = std::max(worst, max_abs(W * W.transpose() - Matrix::Identity(s[0], s[0])));
  }
  return worst;
}

double sphere_preservation(bool broken) {
  TargetSpec spec = main_example_spec(16, 4, 3.0);
  RngStream tr(3, "verify/sphere/target");
  Target t = build_target(spec, tr);
  RngStream init(3, "verify/sphere/init");
  Mlp3Params m = init_three_layer(init, 24, 24, 16);
  Matrix ustar = ustar_directions(m.W1, t.wstar);
  LayerwiseSchedule s;
  s.T1 = 1;
  s.n1 = 200;
  s.eta1_prefactor = 0.05;
  DataSource data(t, RngStream(3, "verify/sphere/data"));
  testing::set_skip_renormalization(broken);
  double worst = 0.0;
  for (int step = 0; step < 8; ++step) {
    spherical_sgd_layer1(m, t, s, data, ustar);
    for (long i = 0; i < m.p1(); ++i) worst = std::max(worst, std::abs(m.W1.row(i).norm() - 1.0));
  }
  testing::set_skip_renormalization(false);
  return worst;
}

// Central differences over a contiguous parameter block.
template <class LossFn>
double fd_check(double* p, long count, const double* analytic, LossFn loss) {
  const double h = 1e-5;
  double err = 0.0, scale = 1e-8;
  for (long i = 0; i < count; ++i) {
    double keep = p[i];
    p[i] = keep + h;
    double lp = loss();
    p[i] = keep - h;
    double lm = loss();
    p[i] = keep;
    double fd = (lp - lm) / (2 * h);
    err = std::max(err, std::abs(fd - analytic[i]));
    scale = std::max(scale, std::abs(fd));
  }
  return err / scale;
}

double gradient_fd() {
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    RngStream rng(5, "verify/fd/" + std::to_string(trial));
    Activation act = trial % 2 ? Activation::tanh() : Activation::composite_even();
    Matrix X = gaussian_matrix(rng, 5, 6);
    Vector y = gaussian_vector(rng, 5);
    for (Loss loss : {Loss::Square, Loss::Correlation}) {
      Mlp3Params m = init_three_layer_gaussian(rng, 4, 4, 6, act);
      m.W1 = gaussian_matrix(rng, 4, 6) / 2.0;
      m.b1 = 0.3 * gaussian_vector(rng, 4);
      m.b2 = 0.3 * gaussian_vector(rng, 4);
      m.b3 = 0.1;
      Grad3 g = backward(m, X, y, loss);
      auto L3 = [&] { return loss_value(forward(m, X).out, y, loss); };
      worst = std::max(worst, fd_check(m.W1.data(), m.W1.size(), g.W1.data(), L3));
      worst = std::max(worst, fd_check(m.W2.data(), m.W2.size(), g.W2.data(), L3));
      worst = std::max(worst, fd_check(m.b1.data(), m.b1.size(), g.b1.data(), L3));
      worst = std::max(worst, fd_check(m.b2.data(), m.b2.size(), g.b2.data(), L3));
      worst = std::max(worst, fd_check(m.w3.data(), m.w3.size(), g.w3.data(), L3));
      worst = std::max(worst, fd_check(&m.b3, 1, &g.b3, L3));

      Mlp2Params m2 = init_two_layer(rng, 4, 6, act);
      m2.w2 = gaussian_vector(rng, 4);
      m2.b1 = 0.3 * gaussian_vector(rng, 4);
      m2.b2 = -0.2;
      Grad2 g2 = backward(m2, X, y, loss);
      auto L2 = [&] { return loss_value(forward(m2, X).out, y, loss); };
      worst = std::max(worst, fd_check(m2.W1.data(), m2.W1.size(), g2.W1.data(), L2));
      worst = std::max(worst, fd_check(m2.b1.data(), m2.b1.size(), g2.b1.data(), L2));
      worst = std::max(worst, fd_check(m2.w2.data(), m2.w2.size(), g2.w2.data(), L2));
      worst = std::max(worst, fd_check(&m2.b2, 1, &g2.b2, L2));
    }
  }
  return worst;
}

double dual_identity() {
  TargetSpec spec = main_example_spec(8, 4, 3.0);
  RngStream tr(7, "verify/dual/target");
  Target t = build_target(spec, tr);
  RngStream init(7, "verify/dual/init");
  Mlp3Params m = init_three_layer(init, 16, 16, 8, Activation::composite_even());
  LayerwiseSchedule s;
  s.n2 = 256;
  s.reinit_layer2 = true;
  s.p2_reinit = 12;
  s.lambda2_multiplier = 0.5;
  s.eta2_prefactor = 1.5;
  DataSource data(t, RngStream(7, "verify/dual/data"), 256);
  auto [X, y] = data.draw(256);
  RngStream r2(7, "verify/dual/layer2");
  precond_step_layer2(m, t, s, data, r2);
  RngStream ev(7, "verify/dual/eval");
  Matrix Xe = gaussian_matrix(ev, 100, 8);
  Matrix primal = forward(m, Xe).h2;
  const double lambda2 = s.lambda2_multiplier * 16.0 / 256.0;
  const double eta2 = s.eta2_prefactor * std::sqrt(12.0);
  Matrix dual = precond_dual_preactivations(m, X, y, Xe, eta2, lambda2);
  return (primal - dual).norm() / dual.norm();
}

double quadratic_form_identity() {
  TargetSpec spec;
  spec.d = 8;
  spec.wstar_rows = 4;
  LevelSpec l;
  l.width = 2;
  l.poly = HermiteSeries({0.0, 0.0, 1.0});
  spec.levels.push_back(l);
  spec.link.kind = LinkKind::Difference;
  RngStream tr(9, "verify/quadform/target");
  Target t = build_target(spec, tr);
  Matrix A = quadratic_form_equivalent(t);
  RngStream xs(9, "verify/quadform/x");
  Matrix X = gaussian_matrix(xs, 1000, 8);
  Matrix H = hidden_features(t, X, 2);
  double worst = 0.0;
  for (long i = 0; i < X.rows(); ++i) {
    double q = X.row(i) * A * X.row(i).transpose();
    worst = std::max(worst, std::abs(H(i, 0) - H(i, 1) - q));
  }
  return worst;
}

double block_independence() {
  TargetSpec spec;
  spec.d = 64;
  spec.wstar_rows = 16;
  LevelSpec a;
  a.width = 4;
  a.poly = HermiteSeries({0.0, 0.0, 1.0, 1.0});
  a.standardize = true;
  LevelSpec b = a;
  b.width = 1;
  spec.levels = {a, b};
  RngStream tr(13, "verify/blocks/target");
  Target t = build_target(spec, tr);
  RngStream xs(13, "verify/blocks/x");
  Matrix X = gaussian_matrix(xs, 10000, 64);
  Matrix H = hidden_features(t, X, 2);
  double worst = 0.0;
  for (long i = 0; i < H.cols(); ++i) {
    auto c = column_correlations(H, H.col(i));
    for (long j = 0; j < H.cols(); ++j)
      if (j != i) worst = std::max(worst, std::abs(c[j]));
  }
  return worst;
}

double ridge_oracle() {
  RngStream rng(17, "verify/ridge");
  Matrix X = gaussian_matrix(rng, 60, 8);
  Matrix W = sphere_rows(rng, 10, 8);
  Matrix H = (X * W.transpose()).array().tanh().matrix();
  Vector y = (X.col(0).array() * X.col(1).array()).matrix() + 0.1 * gaussian_vector(rng, 60);
  double worst = 0.0;
  for (double lam : {1e-4, 1e-2, 1.0}) {
    RidgeFit f = ridge_fit(H, y, lam);
    // augmented normal equations with an unpenalized intercept column
    const long n = H.rows(), p = H.cols();
    Matrix Ha(n, p + 1);
    Ha << H, Matrix::Ones(n, 1);
    Matrix A = Ha.transpose() * Ha / static_cast<double>(n);
    for (long i = 0; i < p; ++i) A(i, i) += lam;
    Matrix sol = gauss_jordan_solve(A, Ha.transpose() * y / static_cast<double>(n));
    Vector full(p + 1);
    full << f.w, f.intercept;
    worst = std::max(worst, (full - sol.col(0)).norm() / sol.norm());
  }
  return worst;
}

double solve_spd_oracle() {
  RngStream rng(19, "verify/spd");
  Matrix G = gaussian_matrix(rng, 50, 50);
  Matrix A = G * G.transpose() + 0.5 * Matrix::Identity(50, 50);
  Matrix B = gaussian_matrix(rng, 50, 3);
  Matrix X = solve_spd(A, B, 0.0);
  Matrix Xo = gauss_jordan_solve(A, B);
  return max_abs(X - Xo) / max_abs(Xo);
}

double layer1_reduction() {
  RngStream rng(23, "verify/reduction");
  Activation act = Activation::composite_even();
  Mlp3Params m = init_three_layer(rng, 7, 7, 9, act);
  Matrix X = gaussian_matrix(rng, 40, 9);
  Vector y = gaussian_vector(rng, 40);
  Grad3 g = backward(m, X, y, Loss::Correlation);
  // two-layer network with activation sigma(sigma(.)) and unit readout
  Matrix ref = Matrix::Zero(7, 9);
  for (long i = 0; i < 7; ++i)
    for (long s = 0; s < 40; ++s) {
      double pre = m.W1.row(i).dot(X.row(s));
      ref.row(i) -= y[s] * act.df(act.f(pre)) * act.df(pre) * X.row(s) / 40.0;
    }
  return max_abs(g.W1 - ref);
}

double composition_base_case() {
  TargetSpec spec = main_example_spec(64, 8, 3.0);
  RngStream tr(29, "verify/herm/target");
  Target t = build_target(spec, tr);
  RngStream rng(29, "verify/herm/mc");
  return hermite_composition_residual(t, 1, 2000, rng);
}

}  // namespace

std::vector<PropertyResult> verify(const VerifyOptions& opt) {
  std::vector<PropertyResult> out;
  auto add = [&](const std::string& name, double value, double thr) {
    out.push_back({name, value, thr, std::isfinite(value) && value <= thr});
  };
  add("hermite_orthonormality", hermite_orthonormality(), 1e-10);
  add("wstar_orthonormality", wstar_orthonormality(), 1e-10);
  add("sphere_preservation", sphere_preservation(opt.break_renormalization), 1e-12);
  add("backward_vs_finite_differences", gradient_fd(), 1e-5);
  add("precond_dual_identity", dual_identity(), 1e-8);
  add("quadratic_form_identity", quadratic_form_identity(), 1e-9);
  add("block_independence", block_independence(), 4.0 / std::sqrt(1e4));
  add("ridge_vs_normal_equations", ridge_oracle(), 1e-8);
  add("solve_spd_vs_explicit_oracle", solve_spd_oracle(), 1e-8);
  add("layer1_two_layer_reduction", layer1_reduction(), 1e-10);
  add("hermite_composition_base_case", composition_base_case(), 1e-12);
  return out;
}

std::string format_report(const std::vector<PropertyResult>& r) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-34s %14s %12s  %s\n", "property", "measured", "threshold", "result");
  os << buf;
  for (const auto& p : r) {
    std::snprintf(buf, sizeof buf, "%-34s %14.3e %12.1e  %s\n", p.name.c_str(), p.value, p.threshold,
                  p.pass ? "PASS" : "FAIL");
    os << buf;
  }
  return os.str();
}

}  // namespace mightlab
