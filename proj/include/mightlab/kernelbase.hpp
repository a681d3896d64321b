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

#include <vector>

#include "mightlab/core.hpp"

namespace mightlab {

struct KernelSpec {
  double c = 1.0;
  std::vector<double> lambda_grid = {1e-8, 1e-6, 1e-4, 1e-2, 1e-1, 1.0, 10.0};
  bool operator==(const KernelSpec&) const = default;
};

// k(x, x') = (x.x')^2 + x.x' + c
Matrix quadratic_gram(const KernelSpec& spec, const Matrix& A, const Matrix& B);

struct KrrResult {
  Vector predictions;
  double lambda = 0.0;
};

// Solves (K + n lambda I) alpha = y with lambda chosen on an 80/20 split, then
// refits on all rows. A single-entry grid skips the split.
KrrResult krr_fit_predict(const KernelSpec& spec, const Matrix& Xtrain, const Vector& ytrain, const Matrix& Xtest);

long interpolation_peak(long d);

// Explicit feature map of the quadratic kernel: d(d-1)/2 + 2d + 1 columns.
Matrix quadratic_feature_map(const Matrix& X, double c);

}  // namespace mightlab
