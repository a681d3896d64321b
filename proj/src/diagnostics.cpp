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

#include "mightlab/diagnostics.hpp"

#include <cmath>
#include <functional>

#include "mightlab/hermite.hpp"

namespace mightlab {

MwResult overlap_mw(const Matrix& W1, const Matrix& wstar) {
  if (W1.cols() != wstar.cols()) throw DimensionError("overlap_mw: W1 and W* must share the input dimension");
  MwResult r;
  double nf = W1.norm();
  r.M = W1 * wstar.transpose();
  if (nf > 0) r.M /= nf;
  r.frob = r.M.norm();
  return r;
}

namespace {

struct MhCore {
  Matrix M;
  std::vector<long> zero;
};

MhCore mh_core(const Matrix& h, const Matrix& hstar, bool centered, const std::vector<long>* rows) {
  const long n = rows ? static_cast<long>(rows->size()) : h.rows();
  const long p = h.cols(), r = hstar.cols();
  Matrix hs(n, p), ts(n, r);
  if (rows) {
    for (long i = 0; i < n; ++i) {
      hs.row(i) = h.row((*rows)[i]);
      ts.row(i) = hstar.row((*rows)[i]);
    }
  } else {
    hs = h;
    ts = hstar;
  }
  if (centered) hs.rowwise() -= hs.colwise().mean();
  MhCore c;
  c.M = (hs.transpose() * ts) / static_cast<double>(n);
  for (long i = 0; i < p; ++i) {
    double rms = std::sqrt(hs.col(i).squaredNorm() / static_cast<double>(n));
    if (rms <= 1e-12 * (1.0 + hs.col(i).cwiseAbs().maxCoeff())) {
      c.M.row(i).setZero();
      c.zero.push_back(i);
    } else {
      c.M.row(i) /= rms;
    }
  }
  return c;
}

}  // namespace

MhResult overlap_mh_from(const Matrix& h, const Matrix& hstar, bool centered, int bootstrap, RngStream* rng) {
  if (h.rows() != hstar.rows()) throw DimensionError("overlap_mh: sample counts differ");
  MhCore c = mh_core(h, hstar, centered, nullptr);
  MhResult r;
  r.M = c.M;
  r.zero_variance = c.zero;
  r.frob = r.M.norm();
  for (long j = 0; j < r.M.cols(); ++j) r.per_direction.push_back(r.M.col(j).norm());
  if (bootstrap > 1 && rng) {
    const long n = h.rows();
    std::vector<double> fs;
    std::vector<std::vector<double>> cols(r.M.cols());
    std::vector<long> rows(n);
    for (int b = 0; b < bootstrap; ++b) {
      for (long i = 0; i < n; ++i) rows[i] = static_cast<long>(rng->below(static_cast<uint64_t>(n)));
      MhCore cb = mh_core(h, hstar, centered, &rows);
      fs.push_back(cb.M.norm());
      for (long j = 0; j < cb.M.cols(); ++j) cols[j].push_back(cb.M.col(j).norm());
    }
    auto sd = [](const std::vector<double>& v) {
      double mu = 0.0;
      for (double x : v) mu += x;
      mu /= static_cast<double>(v.size());
      double s = 0.0;
      for (double x : v) s += (x - mu) * (x - mu);
      return std::sqrt(s / static_cast<double>(v.size() - 1));
    };
    r.frob_se = sd(fs);
    for (auto& cj : cols) r.per_direction_se.push_back(sd(cj));
  }
  return r;
}

MhResult overlap_mh(const Mlp3Params& m, const Target& t, long n_mc, RngStream& rng, bool centered, int bootstrap) {
  if (n_mc < 100) throw std::invalid_argument("overlap_mh: n_mc must be >= 100");
  Matrix X = gaussian_matrix(rng, n_mc, t.spec.d);
  Forward3 f = forward(m, X);
  Matrix hstar = hidden_features(t, X, t.spec.depth());
  RngStream rb = rng.child("bootstrap");
  return overlap_mh_from(f.h2, hstar, centered, bootstrap, &rb);
}

std::vector<double> column_correlations(const Matrix& h, const Vector& v) {
  Vector vc = v.array() - v.mean();
  double sv = vc.norm();
  std::vector<double> out;
  for (long i = 0; i < h.cols(); ++i) {
    Vector c = h.col(i).array() - h.col(i).mean();
    double den = c.norm() * sv;
    out.push_back(den > 0 ? c.dot(vc) / den : 0.0);
  }
  return out;
}

GenError gen_error(const Vector& pred, const Vector& truth) {
  if (pred.size() != truth.size()) throw DimensionError("gen_error: length mismatch");
  const double n = static_cast<double>(pred.size());
  Eigen::ArrayXd e = (pred - truth).array().square();
  GenError g;
  g.mse = e.mean();
  g.se = n > 1 ? std::sqrt((e - g.mse).square().sum() / (n - 1.0) / n) : 0.0;
  return g;
}

GenError gen_error(const Mlp3Params& m, const Target& t, long n_test, RngStream& rng) {
  Matrix X = gaussian_matrix(rng, n_test, t.spec.d);
  return gen_error(forward(m, X).out, eval_target(t, X));
}

GenError gen_error(const Mlp2Params& m, const Target& t, long n_test, RngStream& rng) {
  Matrix X = gaussian_matrix(rng, n_test, t.spec.d);
  return gen_error(forward(m, X).out, eval_target(t, X));
}

double GaussianityReport::max_abs_z() const {
  double m = 0.0;
  for (double z : z_scores) m = std::max(m, std::abs(z));
  return m;
}

GaussianityReport gaussianity_check(const Vector& samples, int max_moment) {
  if (samples.size() < 10000) throw std::invalid_argument("gaussianity_check: needs at least 1e4 samples");
  GaussianityReport r;
  const double n = static_cast<double>(samples.size());
  double mu = samples.mean();
  Eigen::ArrayXd s = samples.array() - mu;
  double sd = std::sqrt(s.square().mean());
  if (!(sd > 1e-300)) {
    r.degenerate = true;
    return r;
  }
  s /= sd;
  auto gauss_moment = [](int k) {
    if (k % 2) return 0.0;
    double v = 1.0;
    for (int j = k - 1; j > 0; j -= 2) v *= j;
    return v;
  };
  for (int k = 1; k <= max_moment; ++k) {
    double mk = s.pow(k).mean();
    double mu_k = gauss_moment(k), mu_2k = gauss_moment(2 * k);
    double var = (mu_2k - mu_k * mu_k) / n;
    r.moments.push_back(mk);
    // first two moments are fixed by the standardization
    r.z_scores.push_back(k <= 2 ? 0.0 : (mk - mu_k) / std::sqrt(var));
  }
  return r;
}

double hermite_composition_residual(const Target& t, int m, long n_mc, RngStream& rng) {
  if (m < 1 || m > 3) throw std::invalid_argument("hermite_composition_residual: m must be 1, 2 or 3");
  if (t.spec.levels.size() != 1 || t.spec.r() != 1)
    throw SpecError("hermite_composition_residual: needs a single-level, single-index target");
  const long w = t.spec.wstar_rows;
  const HermiteSeries& P = t.polys[0][0];
  const double pn = std::sqrt(P.norm_sq());
  const Vector& a = t.block_weights[0][0];
  const double an = a.norm();
  double acc = 0.0;
  for (long s = 0; s < n_mc; ++s) {
    double p1 = 0.0, p2 = 0.0, p3 = 0.0;
    for (long j = 0; j < w; ++j) {
      double u = a[j] / an * P.eval(rng.normal()) / pn;
      p1 += u;
      p2 += u * u;
      p3 += u * u * u;
    }
    double lead;
    if (m == 1)
      lead = p1;
    else if (m == 2)
      lead = (p1 * p1 - p2) / std::sqrt(2.0);
    else
      lead = (p1 * p1 * p1 - 3.0 * p1 * p2 + 2.0 * p3) / std::sqrt(6.0);
    double diff = he_eval(m, p1) - lead;
    acc += diff * diff;
  }
  return std::sqrt(acc / static_cast<double>(n_mc));
}

namespace {

void multi_indices(int dim, int deg, std::vector<std::vector<int>>& out) {
  std::vector<int> cur(dim, 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == dim) {
      out.push_back(cur);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      cur[pos] = k;
      rec(pos + 1, left - k);
    }
    cur[pos] = 0;
  };
  rec(0, deg);
}

Matrix hermite_design(const Matrix& Z, const std::vector<std::vector<int>>& idx, int deg) {
  const long n = Z.rows(), w = Z.cols();
  Matrix F(n, static_cast<long>(idx.size()));
  std::vector<double> he((deg + 1) * w);
  for (long s = 0; s < n; ++s) {
    for (long j = 0; j < w; ++j) he_all(deg, Z(s, j), &he[j * (deg + 1)]);
    for (size_t c = 0; c < idx.size(); ++c) {
      double v = 1.0;
      for (long j = 0; j < w; ++j)
        if (idx[c][j]) v *= he[j * (deg + 1) + idx[c][j]];
      F(s, static_cast<long>(c)) = v;
    }
  }
  return F;
}

}  // namespace

double best_polynomial_error(const Target& t, int deg, long n_fit, long n_test, RngStream& rng) {
  const long w = t.spec.wstar_rows;
  std::vector<std::vector<int>> idx;
  multi_indices(static_cast<int>(w), deg, idx);
  const long p = static_cast<long>(idx.size());
  Matrix A = Matrix::Zero(p, p);
  Vector b = Vector::Zero(p);
  const long chunk = 10000;
  for (long done = 0; done < n_fit; done += chunk) {
    long c = std::min(chunk, n_fit - done);
    Matrix Z = gaussian_matrix(rng, c, w);
    Vector y = apply_link(t, features_from_latent(t, Z, t.spec.depth()));
    Matrix F = hermite_design(Z, idx, deg);
    A.noalias() += F.transpose() * F;
    b.noalias() += F.transpose() * y;
  }
  Vector coef = solve_spd(A, b, 0.0).col(0);
  Matrix Z = gaussian_matrix(rng, n_test, w);
  Vector y = apply_link(t, features_from_latent(t, Z, t.spec.depth()));
  Vector pred = hermite_design(Z, idx, deg) * coef;
  return (pred - y).squaredNorm() / static_cast<double>(n_test);
}

}  // namespace mightlab
