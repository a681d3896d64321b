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

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mightlab {

// Hermite polynomials here are the probabilists' ones scaled to unit variance
// under the standard normal measure: He_2 = (z^2-1)/sqrt(2), He_3 = (z^3-3z)/sqrt(6).
double he_eval(int k, double z);
// Fills out[0..K] with He_0(z)..He_K(z).
void he_all(int K, double z, double* out);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order() const { return static_cast<int>(nodes.size()); }
  double integrate(const std::function<double(double)>& f) const;
};

QuadratureRule gauss_hermite(int order);
const QuadratureRule& default_rule();  // order 100, cached

struct HermiteSeries {
  std::vector<double> coeffs;

  HermiteSeries() = default;
  explicit HermiteSeries(std::vector<double> c) : coeffs(std::move(c)) {}

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  double coeff(int k) const { return k < static_cast<int>(coeffs.size()) ? coeffs[k] : 0.0; }
  double eval(double z) const;
  double deriv(double z) const;
  void trim(double tol = 1e-14);
  double norm_sq() const;
  bool operator==(const HermiteSeries&) const = default;
};

HermiteSeries hermite_coeffs(const std::function<double(double)>& f, int K, const QuadratureRule& rule);

class UndefinedExponentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int information_exponent(const HermiteSeries& s, double tol = 1e-8);

struct AssumptionReport {
  bool a1_link_linear = false;   // link has nonzero first coefficient
  bool a1_poly_quadratic = false;  // block polynomial has nonzero second coefficient
  bool a3 = false;               // link coefficients 2..k vanish
  double link_c1 = 0.0;
  double poly_c2 = 0.0;
  double a3_max = 0.0;
  bool a1() const { return a1_link_linear && a1_poly_quadratic; }
  std::string summary() const;
};

AssumptionReport check_assumptions(const HermiteSeries& gstar, const HermiteSeries& pk, int k,
                                   double tol = 1e-8);

}  // namespace mightlab
