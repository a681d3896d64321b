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

#include "mightlab/activation.hpp"
#include "mightlab/core.hpp"

namespace mightlab {

struct Mlp3Params {
  Matrix W1;  // p1 x d
  Vector b1;
  Matrix W2;  // p2 x p1
  Vector b2;
  Vector w3;  // p2
  double b3 = 0.0;
  Activation act;

  long p1() const { return W1.rows(); }
  long p2() const { return W2.rows(); }
  long d() const { return W1.cols(); }
  void check() const;
};

struct Mlp2Params {
  Matrix W1;  // p x d
  Vector b1;
  Vector w2;
  double b2 = 0.0;
  Activation act;

  long p() const { return W1.rows(); }
  void check() const;
};

enum class Loss { Square, Correlation };
Loss loss_from_string(const std::string& s);

// W1 rows uniform on the sphere, W2 = I, w3 = 1, zero biases.
Mlp3Params init_three_layer(RngStream& rng, long p1, long p2, long d, Activation act = Activation::tanh());
// Initialization for joint training when p2 != p1: W1 rows on the sphere,
// W2 ~ N(0, 1/p1), w3 ~ N(0, 1/p2), zero biases.
Mlp3Params init_three_layer_gaussian(RngStream& rng, long p1, long p2, long d, Activation act = Activation::tanh());
Mlp2Params init_two_layer(RngStream& rng, long p, long d, Activation act = Activation::tanh());

struct Forward3 {
  Vector out;
  Matrix h1, z1, h2, z2;
};

struct Forward2 {
  Vector out;
  Matrix h1, z1;
};

Forward3 forward(const Mlp3Params& m, const Matrix& X);
Forward2 forward(const Mlp2Params& m, const Matrix& X);

struct Grad3 {
  Matrix W1, W2;
  Vector b1, b2, w3;
  double b3 = 0.0;
  double loss = 0.0;
};

struct Grad2 {
  Matrix W1;
  Vector b1, w2;
  double b2 = 0.0;
  double loss = 0.0;
};

double loss_value(const Vector& pred, const Vector& y, Loss loss);
Grad3 backward(const Mlp3Params& m, const Matrix& X, const Vector& y, Loss loss);
Grad2 backward(const Mlp2Params& m, const Matrix& X, const Vector& y, Loss loss);

// Flat binary snapshot: int64 shape header followed by row-major doubles.
void save_snapshot(const Mlp3Params& m, const std::string& path);
Mlp3Params load_snapshot(const std::string& path, Activation act);

}  // namespace mightlab
