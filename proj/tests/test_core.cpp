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
#include <set>

#include "doctest.h"
#include "mightlab/core.hpp"

using namespace mightlab;

TEST_CASE("rng streams are pure functions of seed and label") {
  RngStream a(7, "x"), b(7, "x"), c(7, "y"), d(8, "x");
  uint64_t va = a.next_u64();
  CHECK(va == b.next_u64());
  CHECK(va != c.next_u64());
  CHECK(va != d.next_u64());
  CHECK(RngStream(7, "x").child("k").label() == "x/k");
  RngStream e(7, "x");
  for (int i = 0; i < 1000; ++i) {
    double u = e.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
  RngStream f(3, "below");
  std::set<uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    uint64_t v = f.below(5);
    CHECK(v < 5);
    seen.insert(v);
  }
  CHECK(seen.size() == 5);
}

TEST_CASE("gaussian_matrix") {
  RngStream a(7, "g"), b(7, "g");
  Matrix A = gaussian_matrix(a, 4, 4), B = gaussian_matrix(b, 4, 4);
  CHECK(A == B);

  RngStream r(11, "moments");
  Matrix Z = gaussian_matrix(r, 10000, 1);
  double mean = Z.mean();
  double var = (Z.array() - mean).square().sum() / 9999.0;
  CHECK(std::abs(mean) <= 5.0 / 100.0);
  CHECK(var >= 0.9);
  CHECK(var <= 1.1);
}

TEST_CASE("sample_orthonormal_rows") {
  RngStream r(1, "orth");
  Matrix w = sample_orthonormal_rows(r, 1, 4);
  CHECK(std::abs(w.row(0).norm() - 1.0) <= 1e-12);

  Matrix W = sample_orthonormal_rows(r, 8, 64);
  CHECK(max_abs(W * W.transpose() - Matrix::Identity(8, 8)) <= 1e-10);

  Matrix Q = sample_orthonormal_rows(r, 12, 12);
  CHECK(std::abs(std::abs(Q.determinant()) - 1.0) <= 1e-8);

  CHECK_THROWS_AS(sample_orthonormal_rows(r, 5, 4), DimensionError);
}

TEST_CASE("solve_spd") {
  Vector b(3);
  b << 1.0, -2.0, 0.5;
  Matrix I = Matrix::Identity(3, 3);
  CHECK(max_abs(solve_spd(I, b, 0.0) - Matrix(b)) == 0.0);
  CHECK(max_abs(solve_spd(2.0 * I, I, 0.0) - 0.5 * I) <= 1e-15);

  RngStream r(2, "spd");
  Matrix G = gaussian_matrix(r, 50, 50);
  Matrix A = G * G.transpose() + Matrix::Identity(50, 50);
  Matrix B = gaussian_matrix(r, 50, 2);
  Matrix X = solve_spd(A, B, 0.0);
  CHECK(max_abs(A * X - B) <= 1e-8 * max_abs(B));

  Matrix asym = I;
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(solve_spd(asym, b, 0.0), ContractError);

  // singular PSD matrix is rescued by the jitter ladder
  Matrix S = Matrix::Zero(3, 3);
  S(0, 0) = 1.0;
  CHECK_NOTHROW(solve_spd(S, b, 0.0));
  CHECK_THROWS_AS(solve_spd(-I, b, 0.0), SingularityError);
}

TEST_CASE("median") {
  CHECK(median({1.0, 2.0, 100.0}) == 2.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK(std::isnan(median({})));
}
