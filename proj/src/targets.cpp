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

#include "mightlab/targets.hpp"

#include <cmath>
#include <stdexcept>

namespace mightlab {

std::string to_string(LinkKind k) {
  switch (k) {
    case LinkKind::TanhSum:
      return "tanh_sum";
    case LinkKind::Difference:
      return "difference";
    case LinkKind::ParitySign:
      return "parity_sign";
    case LinkKind::Staircase:
      return "staircase";
    case LinkKind::Identity:
      return "identity";
    case LinkKind::Custom:
      return "custom";
  }
  return "?";
}

std::string to_string(WeightDist w) {
  switch (w) {
    case WeightDist::AllOnes:
      return "all_ones";
    case WeightDist::Gaussian:
      return "gaussian";
    case WeightDist::Rademacher:
      return "rademacher";
  }
  return "?";
}

LinkKind link_from_string(const std::string& s) {
  for (auto k : {LinkKind::TanhSum, LinkKind::Difference, LinkKind::ParitySign, LinkKind::Staircase,
                 LinkKind::Identity, LinkKind::Custom})
    if (to_string(k) == s) return k;
  throw SpecError("unknown link: " + s);
}

WeightDist weight_dist_from_string(const std::string& s) {
  for (auto w : {WeightDist::AllOnes, WeightDist::Gaussian, WeightDist::Rademacher})
    if (to_string(w) == s) return w;
  throw SpecError("unknown weight distribution: " + s);
}

double Link::operator()(const double* h, long r) const {
  switch (kind) {
    case LinkKind::TanhSum: {
      double s = 0.0;
      for (long i = 0; i < r; ++i) s += h[i];
      return std::tanh(scale * s);
    }
    case LinkKind::Difference:
      return scale * (h[0] - (r > 1 ? h[1] : 0.0));
    case LinkKind::ParitySign: {
      double p = 1.0;
      for (long i = 0; i < r; ++i) p *= h[i];
      return scale * ((p > 0) - (p < 0));
    }
    case LinkKind::Staircase:
      return scale * (h[0] + h[0] * (r > 1 ? h[1] : 0.0));
    case LinkKind::Identity: {
      double s = 0.0;
      for (long i = 0; i < r; ++i) s += h[i];
      return scale * s;
    }
    case LinkKind::Custom: {
      double s = 0.0;
      for (long i = 0; i < r; ++i) s += h[i];
      return series.eval(scale * s);
    }
  }
  return 0.0;
}

void TargetSpec::validate() const {
  if (d < 1) throw SpecError("target: d must be >= 1");
  if (wstar_rows < 1 || wstar_rows > d) throw SpecError("target: W* rows must be in [1, d]");
  long prev = wstar_rows;
  for (const auto& l : levels) {
    if (l.width < 1 || l.width >= prev) throw SpecError("target: level widths must be strictly decreasing");
    if (prev % l.width != 0)
      throw SpecError("target: width " + std::to_string(l.width) + " does not divide " + std::to_string(prev));
    if (!l.block_polys.empty() && static_cast<long>(l.block_polys.size()) != l.width)
      throw SpecError("target: block_polys must list one series per block");
    if (l.block_polys.empty() && l.poly.coeffs.empty()) throw SpecError("target: level polynomial missing");
    prev = l.width;
  }
  long rr = r();
  if ((link.kind == LinkKind::Difference || link.kind == LinkKind::Staircase) && rr != 2)
    throw SpecError("target: " + to_string(link.kind) + " link needs r = 2");
}

TargetSpec main_example_spec(long d, long width, double scale) {
  TargetSpec s;
  s.d = d;
  s.wstar_rows = width;
  LevelSpec l;
  l.width = 1;
  l.poly = HermiteSeries({0.0, 0.0, 1.0, 1.0});
  s.levels.push_back(l);
  s.link.kind = LinkKind::TanhSum;
  s.link.scale = scale;
  return s;
}

long Target::level_width(long level) const {
  if (level < 1 || level > spec.depth()) throw std::out_of_range("target level out of range");
  return level == 1 ? spec.wstar_rows : spec.levels[level - 2].width;
}

namespace {

// Applies nonlinear level index li (0-based) to the previous features F.
Matrix apply_level(const Target& t, long li, const Matrix& F) {
  const long w = t.spec.levels[li].width;
  const long b = F.cols() / w;
  const long n = F.rows();
  Matrix out = Matrix::Zero(n, w);
  for (long m = 0; m < w; ++m) {
    const HermiteSeries& P = t.polys[li][m];
    const Vector& a = t.block_weights[li][m];
    const double sc = t.block_scale[li][m];
    for (long i = 0; i < n; ++i) {
      double s = 0.0;
      for (long j = 0; j < b; ++j) s += a[j] * P.eval(F(i, m * b + j));
      out(i, m) = sc * s;
    }
  }
  return out;
}

}  // namespace

Target build_target(const TargetSpec& spec, RngStream& rng) {
  spec.validate();
  Target t;
  t.spec = spec;
  RngStream rw = rng.child("wstar");
  t.wstar = sample_orthonormal_rows(rw, spec.wstar_rows, spec.d);
  RngStream ra = rng.child("weights");
  long prev = spec.wstar_rows;
  for (const auto& l : spec.levels) {
    const long b = prev / l.width;
    std::vector<Vector> ws;
    std::vector<HermiteSeries> ps;
    std::vector<double> sc;
    for (long m = 0; m < l.width; ++m) {
      Vector a(b);
      for (long j = 0; j < b; ++j) {
        switch (spec.weight_dist) {
          case WeightDist::AllOnes:
            a[j] = 1.0;
            break;
          case WeightDist::Gaussian:
            a[j] = ra.normal();
            break;
          case WeightDist::Rademacher:
            a[j] = (ra.next_u64() >> 63) ? 1.0 : -1.0;
            break;
        }
      }
      ws.push_back(a);
      HermiteSeries P = l.block_polys.empty() ? l.poly : l.block_polys[m];
      if (P.coeffs.size() > 0 && P.coeffs[0] != 0.0) {
        P.coeffs[0] = 0.0;
        t.centering_adjusted = true;
      }
      ps.push_back(P);
      sc.push_back(1.0 / std::sqrt(static_cast<double>(b)));
    }
    t.block_weights.push_back(std::move(ws));
    t.polys.push_back(std::move(ps));
    t.block_scale.push_back(std::move(sc));
    prev = l.width;
  }
  // Standardization. The first nonlinear level sees exact i.i.d. Gaussians,
  // so its variance is analytic; deeper levels are measured by Monte Carlo
  // on sampled level-1 features.
  for (size_t li = 0; li < spec.levels.size(); ++li) {
    if (!spec.levels[li].standardize) continue;
    const long w = spec.levels[li].width;
    if (li == 0) {
      for (long m = 0; m < w; ++m) {
        double var = t.block_weights[0][m].squaredNorm() * t.polys[0][m].norm_sq() / static_cast<double>(
                                                                                       t.block_weights[0][m].size());
        if (var > 0) t.block_scale[0][m] /= std::sqrt(var);
      }
    } else {
      RngStream rs = rng.child("standardize").child(std::to_string(li));
      const long n_mc = 100000;
      Matrix Z1 = gaussian_matrix(rs, n_mc, spec.wstar_rows);
      Matrix F = Z1;
      for (size_t lj = 0; lj < li; ++lj) F = apply_level(t, static_cast<long>(lj), F);
      Matrix out = apply_level(t, static_cast<long>(li), F);
      for (long m = 0; m < w; ++m) {
        double mu = out.col(m).mean();
        double var = (out.col(m).array() - mu).square().mean();
        if (var > 0) t.block_scale[li][m] /= std::sqrt(var);
      }
    }
  }
  return t;
}

Matrix features_from_latent(const Target& t, const Matrix& Z1, long level) {
  if (level < 1 || level > t.spec.depth()) throw std::out_of_range("hidden_features: level out of range");
  if (Z1.cols() != t.spec.wstar_rows) throw DimensionError("features_from_latent: width mismatch");
  Matrix F = Z1;
  for (long li = 0; li + 2 <= level; ++li) F = apply_level(t, li, F);
  return F;
}

Matrix hidden_features(const Target& t, const Matrix& X, long level) {
  if (X.cols() != t.spec.d) throw DimensionError("hidden_features: X must have d columns");
  if (level < 1 || level > t.spec.depth()) throw std::out_of_range("hidden_features: level out of range");
  Matrix Z1 = X * t.wstar.transpose();
  return features_from_latent(t, Z1, level);
}

Vector apply_link(const Target& t, const Matrix& H) {
  Vector y(H.rows());
  for (long i = 0; i < H.rows(); ++i) y[i] = t.spec.link(H.row(i).data(), H.cols());
  return y;
}

Vector eval_target(const Target& t, const Matrix& X) {
  return apply_link(t, hidden_features(t, X, t.spec.depth()));
}

HermiteSeries link_series(const Link& l, int K) {
  return hermite_coeffs([&](double z) { return l(&z, 1); }, K, default_rule());
}

CieResult cie_estimate(const Target& t, long level, int k, long n_mc, RngStream& rng, double (*transform)(double)) {
  if (k < 1 || k > 4) throw std::invalid_argument("cie_estimate: k must be in [1, 4]");
  if (n_mc < 1000) throw std::invalid_argument("cie_estimate: n_mc must be >= 1000");
  const long w = t.level_width(level);
  long size = 1;
  for (int i = 0; i < k; ++i) size *= w;
  if (size > 1000000) throw std::length_error("cie_estimate: tensor exceeds memory bound");

  Matrix Z1 = gaussian_matrix(rng, n_mc, t.spec.wstar_rows);
  Matrix H = features_from_latent(t, Z1, level);
  Vector y = apply_link(t, features_from_latent(t, Z1, t.spec.depth()));
  if (transform)
    for (long i = 0; i < n_mc; ++i) y[i] = transform(y[i]);

  // per-sample flattened tensor h^{(x)k} * y, accumulated with sample weights
  std::vector<double> v(size);
  auto sample_tensor = [&](long i) {
    v[0] = y[i];
    long len = 1;
    for (int p = 0; p < k; ++p) {
      for (long a = len - 1; a >= 0; --a)
        for (long c = w - 1; c >= 0; --c) v[a * w + c] = v[a] * H(i, c);
      len *= w;
    }
  };
  // Unbiased estimate of ||E v||^2: (||sum v||^2 - sum ||v||^2) / (n(n-1))
  auto estimate = [&](const std::vector<long>& counts) {
    std::vector<double> s(size, 0.0);
    double diag = 0.0, nn = 0.0;
    for (long i = 0; i < n_mc; ++i) {
      if (!counts[i]) continue;
      sample_tensor(i);
      double c = static_cast<double>(counts[i]);
      double vv = 0.0;
      for (long j = 0; j < size; ++j) {
        s[j] += c * v[j];
        vv += v[j] * v[j];
      }
      diag += c * vv;
      nn += c;
    }
    double ss = 0.0;
    for (double x : s) ss += x * x;
    double u = (ss - diag) / (nn * (nn - 1.0));
    return std::make_pair(u, s);
  };
  std::vector<long> ones(n_mc, 1);
  auto [u, s] = estimate(ones);
  CieResult r;
  r.estimate = std::sqrt(std::max(u, 0.0));
  if (k == 1)
    for (long j = 0; j < w; ++j) r.first_order.push_back(s[j] / n_mc);
  const int B = 20;
  std::vector<double> reps;
  RngStream rb = rng.child("bootstrap");
  for (int b = 0; b < B; ++b) {
    std::vector<long> counts(n_mc, 0);
    for (long i = 0; i < n_mc; ++i) ++counts[rb.below(n_mc)];
    reps.push_back(std::sqrt(std::max(estimate(counts).first, 0.0)));
  }
  double mu = 0.0;
  for (double x : reps) mu += x;
  mu /= B;
  double var = 0.0;
  for (double x : reps) var += (x - mu) * (x - mu);
  r.stderr_ = std::sqrt(var / (B - 1));
  return r;
}

Matrix quadratic_form_equivalent(const Target& t) {
  const auto& s = t.spec;
  if (s.levels.size() != 1 || s.r() != 2 || s.link.kind != LinkKind::Difference ||
      s.weight_dist != WeightDist::AllOnes)
    throw SpecError("quadratic_form_equivalent: needs a two-index MIGHT with all-ones weights and difference link");
  const long b = s.wstar_rows / 2;
  Matrix A = Matrix::Zero(s.d, s.d);
  double cm[2];
  for (long m = 0; m < 2; ++m) {
    const HermiteSeries& P = t.polys[0][m];
    for (int k = 0; k <= P.degree(); ++k)
      if (k != 2 && std::abs(P.coeff(k)) > 1e-14)
        throw SpecError("quadratic_form_equivalent: block polynomial must be a multiple of He2");
    // c He2(z) = (c / sqrt 2)(z^2 - 1); the constants cancel across the two
    // equal-size blocks
    double c = P.coeff(2) / std::sqrt(2.0) * t.block_scale[0][m];
    cm[m] = c;
    double sign = m == 0 ? 1.0 : -1.0;
    for (long j = 0; j < b; ++j) {
      auto row = t.wstar.row(m * b + j);
      A.noalias() += sign * c * row.transpose() * row;
    }
  }
  if (std::abs(cm[0] - cm[1]) > 1e-12 * std::abs(cm[0]))
    throw SpecError("quadratic_form_equivalent: the two blocks must share one polynomial scale");
  return A;
}

}  // namespace mightlab
