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

#include "mightlab/core.hpp"

#include <algorithm>
#include <cmath>

namespace mightlab {

uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t hash_label(uint64_t seed, std::string_view label) {
  // FNV-1a over the label, folded with the seed through two mixing rounds.
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(mix64(seed) ^ h);
}

RngStream::RngStream(uint64_t base_seed, std::string label)
    : base_seed_(base_seed), label_(std::move(label)), key_(hash_label(base_seed, label_)) {}

RngStream RngStream::child(std::string_view sublabel) const {
  std::string l = label_;
  l += '/';
  l += sublabel;
  return RngStream(base_seed_, std::move(l));
}

uint64_t RngStream::next_u64() {
  uint64_t c = counter_++;
  return mix64(key_ ^ mix64(c * 0xd1342543de82ef95ULL + 1));
}

double RngStream::uniform() {
  // 53 random bits, shifted off zero
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 6.283185307179586 * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

uint64_t RngStream::below(uint64_t bound) {
  if (bound == 0) throw ContractError("RngStream::below: bound must be positive");
  uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % bound;
}

Matrix gaussian_matrix(RngStream& rng, long n, long d) {
  if (n < 1 || d < 1) throw DimensionError("gaussian_matrix: n and d must be >= 1");
  Matrix m(n, d);
  double* p = m.data();
  for (long i = 0; i < n * d; ++i) p[i] = rng.normal();
  return m;
}

Vector gaussian_vector(RngStream& rng, long n) {
  Vector v(n);
  for (long i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

Matrix sphere_rows(RngStream& rng, long m, long d) {
  Matrix w = gaussian_matrix(rng, m, d);
  for (long i = 0; i < m; ++i) w.row(i) /= w.row(i).norm();
  return w;
}

Matrix sample_orthonormal_rows(RngStream& rng, long m, long d) {
  if (m < 1 || d < 1) throw DimensionError("sample_orthonormal_rows: m and d must be >= 1");
  if (m > d) throw DimensionError("sample_orthonormal_rows: m > d");
  Eigen::MatrixXd g = gaussian_matrix(rng, m, d).transpose();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, m);
  const Eigen::MatrixXd& r = qr.matrixQR();
  // sign fix on diag(R) makes the distribution exactly Haar
  for (long j = 0; j < m; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  Matrix w = q.transpose();
  // one re-orthonormalization pass pushes WW^T - I down to rounding level
  for (long i = 0; i < m; ++i) {
    for (long k = 0; k < i; ++k) w.row(i) -= w.row(i).dot(w.row(k)) * w.row(k);
    w.row(i) /= w.row(i).norm();
  }
  return w;
}

Matrix solve_spd(const Matrix& A, const Matrix& B, double jitter) {
  if (A.rows() != A.cols()) throw DimensionError("solve_spd: A must be square");
  if (B.rows() != A.rows()) throw DimensionError("solve_spd: row mismatch between A and B");
  double scale = std::max(max_abs(A), 1e-300);
  if (max_abs(A - A.transpose()) > 1e-10 * scale) throw ContractError("solve_spd: A is not symmetric");
  double j = jitter;
  for (int attempt = 0; attempt < 4; ++attempt) {
    Eigen::MatrixXd M = A;
    if (j != 0.0) M.diagonal().array() += j;
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXd x = llt.solve(Eigen::MatrixXd(B));
      if (x.allFinite()) return x;
    }
    j = (j > 0.0) ? j * 10.0 : 1e-12 * scale;
  }
  throw SingularityError("solve_spd: factorization failed after jitter retries");
}

double max_abs(const Matrix& A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace mightlab
