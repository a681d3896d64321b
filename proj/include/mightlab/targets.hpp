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

#pragma once

#include <string>
#include <vector>

#include "mightlab/core.hpp"
#include "mightlab/hermite.hpp"

namespace mightlab {

enum class LinkKind { TanhSum, Difference, ParitySign, Staircase, Identity, Custom };
enum class WeightDist { AllOnes, Gaussian, Rademacher };

std::string to_string(LinkKind k);
std::string to_string(WeightDist w);
LinkKind link_from_string(const std::string& s);
WeightDist weight_dist_from_string(const std::string& s);

struct Link {
  LinkKind kind = LinkKind::TanhSum;
  double scale = 1.0;
  HermiteSeries series;  // only for Custom: g(h) = series(scale * sum h)

  double operator()(const double* h, long r) const;
  bool operator==(const Link&) const = default;
};

// One nonlinear level. Its blocks read consecutive, disjoint groups of the
// previous level's features.
struct LevelSpec {
  long width = 1;
  HermiteSeries poly;
  std::vector<HermiteSeries> block_polys;  // optional per-block override
  bool standardize = false;
  bool operator==(const LevelSpec&) const = default;
};

struct TargetSpec {
  long d = 64;
  long wstar_rows = 8;  // width of the linear level W* x
  std::vector<LevelSpec> levels;
  Link link;
  WeightDist weight_dist = WeightDist::AllOnes;

  long r() const { return levels.empty() ? wstar_rows : levels.back().width; }
  long depth() const { return static_cast<long>(levels.size()) + 1; }
  void validate() const;
  bool operator==(const TargetSpec&) const = default;
};

// tanh(scale * a^T P(W* x) / sqrt(width)) with P = He2 + He3.
TargetSpec main_example_spec(long d, long width, double scale = 3.0);

struct Target {
  TargetSpec spec;
  Matrix wstar;
  // per level, per block: weight vector a of length block size
  std::vector<std::vector<Vector>> block_weights;
  // per level, per block: output multiplier (1/sqrt(b), times the
  // standardization factor when enabled)
  std::vector<std::vector<double>> block_scale;
  std::vector<std::vector<HermiteSeries>> polys;
  bool centering_adjusted = false;

  long level_width(long level) const;
};

Target build_target(const TargetSpec& spec, RngStream& rng);

// Level 1 is W* x; level L = depth is the top-level feature vector.
Matrix hidden_features(const Target& t, const Matrix& X, long level);
// Same as hidden_features but starting from level-1 features.
Matrix features_from_latent(const Target& t, const Matrix& Z1, long level);
Vector eval_target(const Target& t, const Matrix& X);
Vector apply_link(const Target& t, const Matrix& H);

// Hermite series of the link as a scalar map, for single-index links.
HermiteSeries link_series(const Link& l, int K);

struct CieResult {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::vector<double> first_order;  // per-coordinate entries when k = 1
};

CieResult cie_estimate(const Target& t, long level, int k, long n_mc, RngStream& rng,
                       double (*transform)(double) = nullptr);

Matrix quadratic_form_equivalent(const Target& t);

}  // namespace mightlab
