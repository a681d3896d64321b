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
#include "mightlab/kernelbase.hpp"
#include "mightlab/training.hpp"

using namespace mightlab;

TEST_CASE("quadratic kernel values") {
  KernelSpec k;
  Matrix a(1, 2), b(1, 2);
  a << 1, 0;
  b << 0, 1;
  CHECK(quadratic_gram(k, a, b)(0, 0) == 1.0);
  Matrix c(1, 2);
  c << 2, 3;
  // (2)^2 + 2 + 1
  CHECK(quadratic_gram(k, a, c)(0, 0) == 7.0);
}

TEST_CASE("gram matrix is symmetric positive semi-definite") {
  RngStream r(1, "gram");
  Matrix X = gaussian_matrix(r, 120, 10);
  Matrix K = quadratic_gram(KernelSpec{}, X, X);
  CHECK(max_abs(K - K.transpose()) == 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  CHECK(es.eigenvalues().minCoeff() >= -1e-8 * K.norm());
}

TEST_CASE("single training point is interpolated") {
  KernelSpec k;
  k.lambda_grid = {1e-14};
  Matrix x(1, 3);
  x << 0.3, -1.2, 0.8;
  Vector y(1);
  y << 0.7;
  CHECK(krr_fit_predict(k, x, y, x).predictions[0] == doctest::Approx(0.7).epsilon(1e-10));
}

TEST_CASE("kernel ridge equals ridge on the explicit feature map") {
  RngStream r(2, "primal-dual");
  const long d = 6, n = 40;
  Matrix X = gaussian_matrix(r, n, d);
  Vector y = (X.col(0).array() * X.col(1).array() + X.col(2).array()).matrix() + 0.1 * gaussian_vector(r, n);
  Matrix Xt = gaussian_matrix(r, 25, d);
  for (double lam : {1e-3, 1e-1}) {
    KernelSpec k;
    k.lambda_grid = {lam};
    Vector dual = krr_fit_predict(k, X, y, Xt).predictions;
    Matrix F = quadratic_feature_map(X, k.c);
    REQUIRE(F.cols() == d * (d - 1) / 2 + 2 * d + 1);
    // primal: (F^T F + n lam I) beta = F^T y
    Matrix A = F.transpose() * F;
    A.diagonal().array() += n * lam;
    Vector beta = A.ldlt().solve(F.transpose() * y);
    Vector primal = quadratic_feature_map(Xt, k.c) * beta;
    CHECK((primal - dual).lpNorm<Eigen::Infinity>() <= 1e-6);
  }
}

TEST_CASE("lambda selection prefers regularization on noisy data") {
  RngStream r(3, "select");
  Matrix X = gaussian_matrix(r, 150, 8);
  Vector y = gaussian_vector(r, 150);
  KernelSpec k;
  k.lambda_grid = {1e-8, 10.0};
  CHECK(krr_fit_predict(k, X, y, X.topRows(2)).lambda == 10.0);
  k.lambda_grid.clear();
  CHECK_THROWS(krr_fit_predict(k, X, y, X));
}

TEST_CASE("interpolation peak") {
  CHECK(interpolation_peak(2) == 4);
  CHECK(interpolation_peak(1) == 2);
  CHECK(interpolation_peak(64) == 2081);
}
