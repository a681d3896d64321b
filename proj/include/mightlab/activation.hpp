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

#include "mightlab/core.hpp"
#include "mightlab/hermite.hpp"

namespace mightlab {

// sigma(z) = lin*z + logcosh_w*(logcosh z - E[logcosh Z]) + tanh_w*tanh z + he3*He_3(z)
struct MixtureCoeffs {
  double lin = 0.0;
  double logcosh = 0.0;
  double tanh = 1.0;
  double he3 = 0.0;
};

class Activation {
 public:
  enum class Kind { Tanh, Series, Mixture };

  Activation() = default;
  static Activation tanh();
  static Activation series(HermiteSeries s);
  static Activation mixture(MixtureCoeffs c);
  // Used by the figure and deep presets: a mixture whose composition with
  // itself has vanishing first and third Hermite coefficients.
  static Activation composite_even();

  Kind kind() const { return kind_; }
  const HermiteSeries& series_coeffs() const { return series_; }
  const MixtureCoeffs& mixture_coeffs() const { return mix_; }
  std::string name() const;

  double f(double z) const;
  double df(double z) const;

  Matrix apply(const Matrix& Z) const;
  Matrix deriv(const Matrix& Z) const;
  Vector apply(const Vector& z) const;

 private:
  Kind kind_ = Kind::Tanh;
  HermiteSeries series_;
  MixtureCoeffs mix_;
  double logcosh_mean_ = 0.0;
};

double logcosh(double z);

}  // namespace mightlab
