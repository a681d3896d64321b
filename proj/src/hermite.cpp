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

#include "mightlab/hermite.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace mightlab {

double he_eval(int k, double z) {
  if (k < 0) throw std::invalid_argument("he_eval: negative degree");
  if (k == 0) return 1.0;
  double prev = 1.0, cur = z;
  for (int j = 1; j < k; ++j) {
    double next = (z * cur - std::sqrt(static_cast<double>(j)) * prev) / std::sqrt(j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

void he_all(int K, double z, double* out) {
  out[0] = 1.0;
  if (K >= 1) out[1] = z;
  for (int j = 1; j < K; ++j) out[j + 1] = (z * out[j] - std::sqrt(static_cast<double>(j)) * out[j - 1]) / std::sqrt(j + 1.0);
}

double QuadratureRule::integrate(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
  return s;
}

QuadratureRule gauss_hermite(int order) {
  if (order < 1 || order > 200) throw std::out_of_range("gauss_hermite: order must be in [1, 200]");
  // Golub-Welsch on the Jacobi matrix of the monic probabilists' recurrence
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
  for (int i = 1; i < order; ++i) J(i, i - 1) = J(i - 1, i) = std::sqrt(static_cast<double>(i));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadratureRule r;
  r.nodes.resize(order);
  r.weights.resize(order);
  double total = 0.0;
  for (int i = 0; i < order; ++i) {
    r.nodes[i] = es.eigenvalues()[i];
    r.weights[i] = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
    total += r.weights[i];
  }
  for (auto& w : r.weights) w /= total;
  // symmetrize: the exact rule is symmetric about 0
  for (int i = 0; i < order / 2; ++i) {
    int j = order - 1 - i;
    double x = 0.5 * (r.nodes[j] - r.nodes[i]);
    double w = 0.5 * (r.weights[i] + r.weights[j]);
    r.nodes[i] = -x;
    r.nodes[j] = x;
    r.weights[i] = r.weights[j] = w;
  }
  if (order % 2) r.nodes[order / 2] = 0.0;
  return r;
}

const QuadratureRule& default_rule() {
  static const QuadratureRule rule = gauss_hermite(100);
  return rule;
}

double HermiteSeries::eval(double z) const {
  if (coeffs.empty()) return 0.0;
  int K = degree();
  double prev = 1.0, cur = z, s = coeffs[0];
  if (K >= 1) s += coeffs[1] * z;
  for (int j = 1; j < K; ++j) {
    double next = (z * cur - std::sqrt(static_cast<double>(j)) * prev) / std::sqrt(j + 1.0);
    prev = cur;
    cur = next;
    s += coeffs[j + 1] * cur;
  }
  return s;
}

double HermiteSeries::deriv(double z) const {
  // d/dz He_k = sqrt(k) He_{k-1} in the unit-variance normalization
  double s = 0.0;
  for (int k = 1; k <= degree(); ++k)
    if (coeffs[k] != 0.0) s += coeffs[k] * std::sqrt(static_cast<double>(k)) * he_eval(k - 1, z);
  return s;
}

void HermiteSeries::trim(double tol) {
  while (coeffs.size() > 1 && std::abs(coeffs.back()) < tol) coeffs.pop_back();
}

double HermiteSeries::norm_sq() const {
  double s = 0.0;
  for (double c : coeffs) s += c * c;
  return s;
}

HermiteSeries hermite_coeffs(const std::function<double(double)>& f, int K, const QuadratureRule& rule) {
  if (K < 0) throw std::invalid_argument("hermite_coeffs: negative degree");
  if (rule.order() < K + 1) throw std::invalid_argument("hermite_coeffs: quadrature order too low");
  std::vector<double> c(K + 1, 0.0), h(K + 1);
  for (int i = 0; i < rule.order(); ++i) {
    double fz = f(rule.nodes[i]);
    he_all(K, rule.nodes[i], h.data());
    for (int k = 0; k <= K; ++k) c[k] += rule.weights[i] * fz * h[k];
  }
  return HermiteSeries(std::move(c));
}

int information_exponent(const HermiteSeries& s, double tol) {
  for (int k = 1; k <= s.degree(); ++k)
    if (std::abs(s.coeffs[k]) > tol) return k;
  throw UndefinedExponentError("information_exponent: all coefficients of degree >= 1 are below tolerance");
}

std::string AssumptionReport::summary() const {
  std::ostringstream os;
  os << "A1 " << (a1() ? "pass" : "fail") << " (link c1=" << link_c1 << ", poly c2=" << poly_c2 << "); A3 "
     << (a3 ? "pass" : "fail") << " (max |c_j|=" << a3_max << ")";
  return os.str();
}

AssumptionReport check_assumptions(const HermiteSeries& gstar, const HermiteSeries& pk, int k, double tol) {
  AssumptionReport r;
  r.link_c1 = gstar.coeff(1);
  r.poly_c2 = pk.coeff(2);
  r.a1_link_linear = std::abs(r.link_c1) > tol;
  r.a1_poly_quadratic = std::abs(r.poly_c2) > tol;
  double m = 0.0;
  for (int j = 2; j <= k; ++j) m = std::max(m, std::abs(gstar.coeff(j)));
  r.a3_max = m;
  r.a3 = m <= tol;
  return r;
}

}  // namespace mightlab
