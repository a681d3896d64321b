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

#include "mightlab/models.hpp"

#include <cstdint>
#include <fstream>

namespace mightlab {

void Mlp3Params::check() const {
  if (b1.size() != W1.rows() || W2.cols() != W1.rows() || b2.size() != W2.rows() || w3.size() != W2.rows())
    throw DimensionError("Mlp3Params: inconsistent shapes");
}

void Mlp2Params::check() const {
  if (b1.size() != W1.rows() || w2.size() != W1.rows()) throw DimensionError("Mlp2Params: inconsistent shapes");
}

Loss loss_from_string(const std::string& s) {
  if (s == "square") return Loss::Square;
  if (s == "correlation") return Loss::Correlation;
  throw std::invalid_argument("unknown loss: " + s);
}

Mlp3Params init_three_layer(RngStream& rng, long p1, long p2, long d, Activation act) {
  if (p1 < 1 || p2 < 1 || d < 1) throw DimensionError("init_three_layer: sizes must be >= 1");
  if (p1 != p2) throw DimensionError("init_three_layer: W2 = I needs p2 == p1");
  Mlp3Params m;
  m.W1 = sphere_rows(rng, p1, d);
  m.b1 = Vector::Zero(p1);
  m.W2 = Matrix::Identity(p2, p1);
  m.b2 = Vector::Zero(p2);
  m.w3 = Vector::Ones(p2);
  m.act = std::move(act);
  return m;
}

Mlp3Params init_three_layer_gaussian(RngStream& rng, long p1, long p2, long d, Activation act) {
  if (p1 < 1 || p2 < 1 || d < 1) throw DimensionError("init_three_layer_gaussian: sizes must be >= 1");
  Mlp3Params m;
  m.W1 = sphere_rows(rng, p1, d);
  m.b1 = Vector::Zero(p1);
  m.W2 = gaussian_matrix(rng, p2, p1) / std::sqrt(static_cast<double>(p1));
  m.b2 = Vector::Zero(p2);
  m.w3 = gaussian_vector(rng, p2) / std::sqrt(static_cast<double>(p2));
  m.act = std::move(act);
  return m;
}

Mlp2Params init_two_layer(RngStream& rng, long p, long d, Activation act) {
  Mlp2Params m;
  m.W1 = sphere_rows(rng, p, d);
  m.b1 = Vector::Zero(p);
  m.w2 = Vector::Ones(p);
  m.act = std::move(act);
  return m;
}

Forward3 forward(const Mlp3Params& m, const Matrix& X) {
  if (X.cols() != m.d()) throw DimensionError("forward: X column count differs from d");
  Forward3 f;
  f.h1 = X * m.W1.transpose();
  f.h1.rowwise() += m.b1.transpose();
  f.z1 = m.act.apply(f.h1);
  f.h2 = f.z1 * m.W2.transpose();
  f.h2.rowwise() += m.b2.transpose();
  f.z2 = m.act.apply(f.h2);
  f.out = f.z2 * m.w3;
  f.out.array() += m.b3;
  return f;
}

Forward2 forward(const Mlp2Params& m, const Matrix& X) {
  if (X.cols() != m.W1.cols()) throw DimensionError("forward: X column count differs from d");
  Forward2 f;
  f.h1 = X * m.W1.transpose();
  f.h1.rowwise() += m.b1.transpose();
  f.z1 = m.act.apply(f.h1);
  f.out = f.z1 * m.w2;
  f.out.array() += m.b2;
  return f;
}

double loss_value(const Vector& pred, const Vector& y, Loss loss) {
  const double n = static_cast<double>(y.size());
  if (loss == Loss::Square) return 0.5 * (pred - y).squaredNorm() / n;
  return -pred.dot(y) / n;
}

namespace {

Vector output_delta(const Vector& pred, const Vector& y, Loss loss) {
  const double n = static_cast<double>(y.size());
  if (loss == Loss::Square) return (pred - y) / n;
  return -y / n;
}

}  // namespace

Grad3 backward(const Mlp3Params& m, const Matrix& X, const Vector& y, Loss loss) {
  if (y.size() != X.rows()) throw DimensionError("backward: y length differs from batch size");
  Forward3 f = forward(m, X);
  Grad3 g;
  g.loss = loss_value(f.out, y, loss);
  Vector delta = output_delta(f.out, y, loss);
  g.w3 = f.z2.transpose() * delta;
  g.b3 = delta.sum();
  Matrix d2 = (delta * m.w3.transpose()).cwiseProduct(m.act.deriv(f.h2));
  g.W2 = d2.transpose() * f.z1;
  g.b2 = d2.colwise().sum().transpose();
  Matrix d1 = (d2 * m.W2).cwiseProduct(m.act.deriv(f.h1));
  g.W1 = d1.transpose() * X;
  g.b1 = d1.colwise().sum().transpose();
  return g;
}

Grad2 backward(const Mlp2Params& m, const Matrix& X, const Vector& y, Loss loss) {
  if (y.size() != X.rows()) throw DimensionError("backward: y length differs from batch size");
  Forward2 f = forward(m, X);
  Grad2 g;
  g.loss = loss_value(f.out, y, loss);
  Vector delta = output_delta(f.out, y, loss);
  g.w2 = f.z1.transpose() * delta;
  g.b2 = delta.sum();
  Matrix d1 = (delta * m.w2.transpose()).cwiseProduct(m.act.deriv(f.h1));
  g.W1 = d1.transpose() * X;
  g.b1 = d1.colwise().sum().transpose();
  return g;
}

namespace {

void write_block(std::ofstream& os, const double* p, int64_t rows, int64_t cols) {
  os.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  os.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  os.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(sizeof(double) * rows * cols));
}

Matrix read_block(std::ifstream& is) {
  int64_t rows = 0, cols = 0;
  is.read(reinterpret_cast<char*>(&rows), sizeof rows);
  is.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!is || rows < 0 || cols < 0 || rows * cols > (int64_t{1} << 32)) throw std::runtime_error("snapshot: bad header");
  Matrix m(rows, cols);
  is.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(double) * rows * cols));
  if (!is) throw std::runtime_error("snapshot: truncated");
  return m;
}

}  // namespace

void save_snapshot(const Mlp3Params& m, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("snapshot: cannot open " + path);
  write_block(os, m.W1.data(), m.W1.rows(), m.W1.cols());
  write_block(os, m.b1.data(), 1, m.b1.size());
  write_block(os, m.W2.data(), m.W2.rows(), m.W2.cols());
  write_block(os, m.b2.data(), 1, m.b2.size());
  write_block(os, m.w3.data(), 1, m.w3.size());
  write_block(os, &m.b3, 1, 1);
}

Mlp3Params load_snapshot(const std::string& path, Activation act) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("snapshot: cannot open " + path);
  Mlp3Params m;
  m.W1 = read_block(is);
  m.b1 = read_block(is).transpose();
  m.W2 = read_block(is);
  m.b2 = read_block(is).transpose();
  m.w3 = read_block(is).transpose();
  m.b3 = read_block(is)(0, 0);
  m.act = std::move(act);
  m.check();
  return m;
}

}  // namespace mightlab
