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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace mightlab {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

uint64_t mix64(uint64_t z);
uint64_t hash_label(uint64_t seed, std::string_view label);

// Counter-based stream: value i is a pure function of (key, i), so a stream
// can be recreated anywhere from its base seed and label.
class RngStream {
 public:
  RngStream(uint64_t base_seed, std::string label);

  RngStream child(std::string_view sublabel) const;

  uint64_t next_u64();
  double uniform();   // in (0, 1)
  double normal();
  uint64_t below(uint64_t bound);

  uint64_t base_seed() const { return base_seed_; }
  const std::string& label() const { return label_; }
  uint64_t counter() const { return counter_; }
  uint64_t key() const { return key_; }

 private:
  uint64_t base_seed_;
  std::string label_;
  uint64_t key_;
  uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

Matrix gaussian_matrix(RngStream& rng, long n, long d);
Vector gaussian_vector(RngStream& rng, long n);
Matrix sphere_rows(RngStream& rng, long m, long d);
Matrix sample_orthonormal_rows(RngStream& rng, long m, long d);

// Solves (A + jitter I) X = B. On a failed factorization the jitter is raised
// by decades, at most three more times.
Matrix solve_spd(const Matrix& A, const Matrix& B, double jitter);

double max_abs(const Matrix& A);
double median(std::vector<double> v);

}  // namespace mightlab
