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

#include "mightlab/kernelbase.hpp"

#include <cmath>
#include <limits>

namespace mightlab {

Matrix quadratic_gram(const KernelSpec& spec, const Matrix& A, const Matrix& B) {
  if (A.cols() != B.cols()) throw DimensionError("quadratic_gram: column mismatch");
  Matrix G = A * B.transpose();
  return (G.array().square() + G.array() + spec.c).matrix();
}

namespace {

Vector krr_solve(const KernelSpec& spec, const Matrix& X, const Vector& y, double lambda) {
  Matrix K = quadratic_gram(spec, X, X);
  const double n = static_cast<double>(X.rows());
  return solve_spd(K, y, n * lambda).col(0);
}

}  // namespace

KrrResult krr_fit_predict(const KernelSpec& spec, const Matrix& Xtrain, const Vector& ytrain, const Matrix& Xtest) {
  if (spec.lambda_grid.empty()) throw std::invalid_argument("krr_fit_predict: empty lambda grid");
  if (Xtrain.rows() > 50000) throw std::length_error("krr_fit_predict: n exceeds the dense Gram limit");
  const long n = Xtrain.rows();
  double best_lambda = spec.lambda_grid.front();
  const long ntr = (8 * n) / 10;
  if (spec.lambda_grid.size() > 1 && ntr >= 1 && ntr < n) {
    Matrix Xa = Xtrain.topRows(ntr), Xv = Xtrain.bottomRows(n - ntr);
    Vector ya = ytrain.head(ntr), yv = ytrain.tail(n - ntr);
    Matrix Kva = quadratic_gram(spec, Xv, Xa);
    double best = std::numeric_limits<double>::infinity();
    for (double lam : spec.lambda_grid) {
      Vector alpha = krr_solve(spec, Xa, ya, lam);
      double err = (Kva * alpha - yv).squaredNorm();
      if (err < best) {
        best = err;
        best_lambda = lam;
      }
    }
  }
  Vector alpha = krr_solve(spec, Xtrain, ytrain, best_lambda);
  KrrResult r;
  r.lambda = best_lambda;
  r.predictions = quadratic_gram(spec, Xtest, Xtrain) * alpha;
  return r;
}

long interpolation_peak(long d) { return d * (d - 1) / 2 + d + 1; }

Matrix quadratic_feature_map(const Matrix& X, double c) {
  const long n = X.rows(), d = X.cols();
  const long dim = d * (d - 1) / 2 + 2 * d + 1;
  Matrix F(n, dim);
  const double r2 = std::sqrt(2.0);
  for (long s = 0; s < n; ++s) {
    long k = 0;
    for (long i = 0; i < d; ++i) F(s, k++) = X(s, i) * X(s, i);
    for (long i = 0; i < d; ++i)
      for (long j = i + 1; j < d; ++j) F(s, k++) = r2 * X(s, i) * X(s, j);
    for (long i = 0; i < d; ++i) F(s, k++) = X(s, i);
    F(s, k++) = std::sqrt(c);
  }
  return F;
}

}  // namespace mightlab
