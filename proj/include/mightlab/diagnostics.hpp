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
#include "mightlab/models.hpp"
#include "mightlab/targets.hpp"

namespace mightlab {

struct MwResult {
  Matrix M;
  double frob = 0.0;
};

// M_W = W1 W*^T / |W1|_F
MwResult overlap_mw(const Matrix& W1, const Matrix& wstar);

struct MhResult {
  Matrix M;  // p2 x r
  double frob = 0.0;
  std::vector<double> per_direction;  // column norms
  std::vector<long> zero_variance;    // neurons reported as 0
  double frob_se = 0.0;               // bootstrap standard error, when requested
  std::vector<double> per_direction_se;
};

// Entry (i, j) = E[(h_i - mean h_i) h*_j] / rms(h_i - mean h_i). With
// centered = false the raw second moment is used instead.
MhResult overlap_mh_from(const Matrix& h, const Matrix& hstar, bool centered = true, int bootstrap = 0,
                         RngStream* rng = nullptr);
MhResult overlap_mh(const Mlp3Params& m, const Target& t, long n_mc, RngStream& rng, bool centered = true,
                    int bootstrap = 0);

// Per-column sample correlation of h with the vector v.
std::vector<double> column_correlations(const Matrix& h, const Vector& v);

struct GenError {
  double mse = 0.0;
  double se = 0.0;
};

GenError gen_error(const Vector& pred, const Vector& truth);
GenError gen_error(const Mlp3Params& m, const Target& t, long n_test, RngStream& rng);
GenError gen_error(const Mlp2Params& m, const Target& t, long n_test, RngStream& rng);

struct GaussianityReport {
  std::vector<double> moments;  // standardized empirical moments 1..K
  std::vector<double> z_scores;
  bool degenerate = false;
  double max_abs_z() const;
};

GaussianityReport gaussianity_check(const Vector& samples, int max_moment);

// L2 norm of He_m(h*) minus its leading permutation-sum term, with the
// block polynomial rescaled to unit variance.
double hermite_composition_residual(const Target& t, int m, long n_mc, RngStream& rng);

// Best L2 approximation error of f* by polynomials of total degree <= deg in
// z = W* x, fit by least squares on n_fit samples and scored on n_test.
double best_polynomial_error(const Target& t, int deg, long n_fit, long n_test, RngStream& rng);

}  // namespace mightlab
