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

#include "mightlab/activation.hpp"

#include <cmath>
#include <sstream>

namespace mightlab {

double logcosh(double z) {
  double a = std::abs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - 0.6931471805599453;
}

Activation Activation::tanh() { return Activation(); }

Activation Activation::series(HermiteSeries s) {
  Activation a;
  a.kind_ = Kind::Series;
  a.series_ = std::move(s);
  return a;
}

Activation Activation::mixture(MixtureCoeffs c) {
  Activation a;
  a.kind_ = Kind::Mixture;
  a.mix_ = c;
  a.logcosh_mean_ = default_rule().integrate([](double z) { return logcosh(z); });
  return a;
}

Activation Activation::composite_even() {
  return mixture({-0.53366939718047923, 1.7392106, 0.90905083, -0.093422588181610491});
}

std::string Activation::name() const {
  switch (kind_) {
    case Kind::Tanh:
      return "tanh";
    case Kind::Series:
      return "series";
    case Kind::Mixture:
      return "mixture";
  }
  return "?";
}

double Activation::f(double z) const {
  switch (kind_) {
    case Kind::Tanh:
      return std::tanh(z);
    case Kind::Series:
      return series_.eval(z);
    case Kind::Mixture:
      return mix_.lin * z + mix_.logcosh * (logcosh(z) - logcosh_mean_) + mix_.tanh * std::tanh(z) +
             mix_.he3 * (z * z * z - 3.0 * z) / std::sqrt(6.0);
  }
  return 0.0;
}

double Activation::df(double z) const {
  switch (kind_) {
    case Kind::Tanh: {
      double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Kind::Series:
      return series_.deriv(z);
    case Kind::Mixture: {
      double t = std::tanh(z);
      return mix_.lin + mix_.logcosh * t + mix_.tanh * (1.0 - t * t) + mix_.he3 * (3.0 * z * z - 3.0) / std::sqrt(6.0);
    }
  }
  return 0.0;
}

namespace {

using Flat = Eigen::Map<Eigen::ArrayXd>;
using ConstFlat = Eigen::Map<const Eigen::ArrayXd>;

// tanh and logcosh share e = exp(-2|z|); Eigen vectorizes exp and log.
struct Parts {
  Eigen::ArrayXd t, e;
};

Parts tanh_parts(const ConstFlat& z) {
  Parts p;
  p.e = (-2.0 * z.abs()).exp();
  p.t = (1.0 - p.e) / (1.0 + p.e);
  p.t = (z < 0.0).select(-p.t, p.t);
  return p;
}

}  // namespace

Matrix Activation::apply(const Matrix& Z) const {
  Matrix out(Z.rows(), Z.cols());
  ConstFlat z(Z.data(), Z.size());
  Flat o(out.data(), out.size());
  switch (kind_) {
    case Kind::Tanh:
      o = tanh_parts(z).t;
      break;
    case Kind::Mixture: {
      Parts p = tanh_parts(z);
      Eigen::ArrayXd lc = z.abs() + (1.0 + p.e).log() - 0.6931471805599453;
      o = mix_.lin * z + mix_.logcosh * (lc - logcosh_mean_) + mix_.tanh * p.t +
          (mix_.he3 / std::sqrt(6.0)) * (z * z * z - 3.0 * z);
      break;
    }
    case Kind::Series:
      for (long i = 0; i < Z.size(); ++i) o[i] = series_.eval(z[i]);
      break;
  }
  return out;
}

Matrix Activation::deriv(const Matrix& Z) const {
  Matrix out(Z.rows(), Z.cols());
  ConstFlat z(Z.data(), Z.size());
  Flat o(out.data(), out.size());
  switch (kind_) {
    case Kind::Tanh: {
      Eigen::ArrayXd t = tanh_parts(z).t;
      o = 1.0 - t * t;
      break;
    }
    case Kind::Mixture: {
      Eigen::ArrayXd t = tanh_parts(z).t;
      o = mix_.lin + mix_.logcosh * t + mix_.tanh * (1.0 - t * t) + (mix_.he3 / std::sqrt(6.0)) * (3.0 * z * z - 3.0);
      break;
    }
    case Kind::Series:
      for (long i = 0; i < Z.size(); ++i) o[i] = series_.deriv(z[i]);
      break;
  }
  return out;
}

Vector Activation::apply(const Vector& z) const {
  Vector out(z.size());
  for (long i = 0; i < z.size(); ++i) out[i] = f(z[i]);
  return out;
}

}  // namespace mightlab
