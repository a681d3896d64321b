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
#include "mightlab/diagnostics.hpp"
#include "mightlab/targets.hpp"

using namespace mightlab;

namespace {

TargetSpec might(long d, long wstar_rows, long r, LinkKind link) {
  TargetSpec t;
  t.d = d;
  t.wstar_rows = wstar_rows;
  LevelSpec l;
  l.width = r;
  l.poly = HermiteSeries({0.0, 0.0, 1.0, 1.0});
  l.standardize = true;
  t.levels.push_back(l);
  t.link.kind = link;
  return t;
}

Matrix column_cov(const Matrix& H) {
  Matrix C = H.rowwise() - H.colwise().mean();
  return C.transpose() * C / static_cast<double>(H.rows() - 1);
}

}  // namespace

TEST_CASE("build_target shapes and validation") {
  RngStream r(1, "target");
  Target t = build_target(main_example_spec(16, 4, 3.0), r);
  CHECK(t.wstar.rows() == 4);
  CHECK(t.wstar.cols() == 16);
  CHECK(max_abs(t.wstar * t.wstar.transpose() - Matrix::Identity(4, 4)) <= 1e-10);
  CHECK_FALSE(t.centering_adjusted);

  TargetSpec deep;
  deep.d = 64;
  deep.wstar_rows = 8;
  LevelSpec a;
  a.width = 4;
  a.poly = HermiteSeries({0.0, 0.0, 1.0, 1.0});
  LevelSpec b = a;
  b.width = 1;
  deep.levels = {a, b};
  RngStream r2(1, "target");
  Target td = build_target(deep, r2);
  CHECK(td.spec.depth() == 3);
  CHECK(td.block_weights[0].size() == 4);
  CHECK(td.block_weights[0][0].size() == 2);

  TargetSpec bad = deep;
  bad.levels = {a};
  bad.levels[0].width = 3;
  CHECK_THROWS_AS(bad.validate(), SpecError);
  RngStream r3(1, "target");
  CHECK_THROWS_AS(build_target(bad, r3), SpecError);

  TargetSpec grow = deep;
  grow.levels[1].width = 8;
  CHECK_THROWS_AS(grow.validate(), SpecError);

  TargetSpec diff = might(16, 4, 3, LinkKind::Difference);
  diff.levels[0].width = 4;
  CHECK_THROWS_AS(diff.validate(), SpecError);
}

TEST_CASE("constant term of the block polynomial is removed and flagged") {
  TargetSpec s = main_example_spec(16, 4, 3.0);
  s.levels[0].poly = HermiteSeries({0.5, 0.0, 1.0});
  RngStream r(1, "target");
  Target t = build_target(s, r);
  CHECK(t.centering_adjusted);
  CHECK(t.polys[0][0].coeff(0) == 0.0);
}

TEST_CASE("eval_target on the main example") {
  RngStream r(1, "target");
  Target t = build_target(main_example_spec(16, 4, 3.0), r);
  Matrix x0 = Matrix::Zero(1, 16);
  // P3(0) = -1/sqrt(2) per coordinate, h = 4 * (-1/sqrt(2)) / 2 = -sqrt(2)
  CHECK(hidden_features(t, x0, 2)(0, 0) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-14));
  CHECK(eval_target(t, x0)[0] == doctest::Approx(-0.999587114671143).epsilon(1e-13));

  RngStream xs(2, "x");
  Matrix X = gaussian_matrix(xs, 40000, 16);
  Matrix h = hidden_features(t, X, 2);
  double var = (h.array() - h.mean()).square().mean();
  CHECK(var == doctest::Approx(2.0).epsilon(0.05));

  Target zero = t;
  zero.spec.link.kind = LinkKind::Custom;
  zero.spec.link.series = HermiteSeries({0.0});
  CHECK(eval_target(zero, X.topRows(50)).isZero(0.0));
}

TEST_CASE("hidden feature statistics") {
  RngStream r(3, "target");
  TargetSpec s;
  s.d = 64;
  s.wstar_rows = 16;
  LevelSpec a;
  a.width = 4;
  a.poly = HermiteSeries({0.0, 0.0, 1.0, 1.0});
  a.standardize = true;
  LevelSpec b = a;
  b.width = 1;
  s.levels = {a, b};
  Target t = build_target(s, r);
  const long n = 10000;
  RngStream xs(3, "x");
  Matrix X = gaussian_matrix(xs, n, 64);
  Matrix C1 = column_cov(hidden_features(t, X, 1));
  Matrix C2 = column_cov(hidden_features(t, X, 2));
  double tol = 4.0 / std::sqrt(static_cast<double>(n));
  for (long i = 0; i < C1.rows(); ++i) {
    CHECK(C1(i, i) == doctest::Approx(1.0).epsilon(0.06));
    for (long j = 0; j < C1.cols(); ++j)
      if (i != j) CHECK(std::abs(C1(i, j)) <= tol);
  }
  for (long i = 0; i < C2.rows(); ++i) {
    CHECK(C2(i, i) == doctest::Approx(1.0).epsilon(0.1));
    for (long j = 0; j < C2.cols(); ++j)
      if (i != j) CHECK(std::abs(C2(i, j)) <= tol);
  }
}

TEST_CASE("quadratic_form_equivalent") {
  TargetSpec s;
  s.d = 8;
  s.wstar_rows = 4;
  LevelSpec l;
  l.width = 2;
  l.poly = HermiteSeries({0.0, 0.0, 1.0});
  s.levels = {l};
  s.link.kind = LinkKind::Difference;
  RngStream r(5, "target");
  Target t = build_target(s, r);
  Matrix A = quadratic_form_equivalent(t);
  CHECK(max_abs(A - A.transpose()) <= 1e-15);
  CHECK(std::abs(A.trace()) <= 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  long rank = (es.eigenvalues().array().abs() > 1e-10).count();
  CHECK(rank == 4);

  RngStream xs(5, "x");
  Matrix X = gaussian_matrix(xs, 1000, 8);
  Matrix H = hidden_features(t, X, 2);
  double worst = 0.0;
  for (long i = 0; i < 1000; ++i)
    worst = std::max(worst, std::abs(H(i, 0) - H(i, 1) - X.row(i) * A * X.row(i).transpose()));
  CHECK(worst <= 1e-9);

  Target other = t;
  other.spec.link.kind = LinkKind::TanhSum;
  CHECK_THROWS(quadratic_form_equivalent(other));
}

TEST_CASE("compositional information exponent estimates") {
  RngStream r(7, "target");
  Target parity = build_target(might(64, 24, 3, LinkKind::ParitySign), r);
  RngStream m1(7, "cie1");
  CieResult first = cie_estimate(parity, 2, 1, 20000, m1);
  CHECK(first.estimate <= 3.0 * first.stderr_ + 0.02);
  RngStream m3(7, "cie3");
  CieResult third = cie_estimate(parity, 2, 3, 20000, m3);
  CHECK(third.estimate > 5.0 * third.stderr_);

  RngStream r2(7, "target2");
  Target stair = build_target(might(64, 16, 2, LinkKind::Staircase), r2);
  RngStream ms(7, "cie-stair");
  CieResult s1 = cie_estimate(stair, 2, 1, 100000, ms);
  REQUIRE(s1.first_order.size() == 2);
  CHECK(std::abs(s1.first_order[0]) > 0.5);
  CHECK(std::abs(s1.first_order[1]) < 0.03);

  RngStream bad(7, "bad");
  CHECK_THROWS(cie_estimate(stair, 2, 5, 1000, bad));
  CHECK_THROWS(cie_estimate(stair, 2, 1, 10, bad));
}

TEST_CASE("enum string round trips") {
  for (LinkKind k : {LinkKind::TanhSum, LinkKind::Difference, LinkKind::ParitySign, LinkKind::Staircase,
                     LinkKind::Identity, LinkKind::Custom})
    CHECK(link_from_string(to_string(k)) == k);
  for (WeightDist w : {WeightDist::AllOnes, WeightDist::Gaussian, WeightDist::Rademacher})
    CHECK(weight_dist_from_string(to_string(w)) == w);
  CHECK_THROWS(link_from_string("nope"));
}
