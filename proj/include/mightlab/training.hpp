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

#include <optional>
#include <string>
#include <vector>

#include "mightlab/core.hpp"
#include "mightlab/models.hpp"
#include "mightlab/targets.hpp"

namespace mightlab {

enum class Layer2Mode { SinglePrecondStep, MultiStepReuse };
std::string to_string(Layer2Mode m);
Layer2Mode layer2_mode_from_string(const std::string& s);

struct LayerwiseSchedule {
  long T1 = 62;
  long n1 = 0;  // 0: use the cell's n
  double eta1_prefactor = 1.0;
  long n2 = 0;
  double eta2_prefactor = 2.0;
  double lambda2_multiplier = 1.0;
  long n3 = 0;
  std::vector<double> ridge_lambda_grid = {1e-6, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  bool reuse_batches = false;
  bool reinit_layer2 = false;
  Layer2Mode layer2_mode = Layer2Mode::MultiStepReuse;
  long multi_step_T2 = 2560;
  double multi_step_lr = 2.0;
  long p2_reinit = 0;  // width of layer 2 after reinitialization; 0 keeps p1

  // Returns a copy with the zero batch sizes replaced by n.
  LayerwiseSchedule resolved(long n) const;
  void validate() const;
  bool operator==(const LayerwiseSchedule&) const = default;
};

struct JointSchedule {
  long T = 2560;
  double minibatch_fraction = 0.7;
  double lr_w1 = 0.2, lr_w2 = 0.2, lr_w3 = 0.2;
  long snapshot_every = 0;
  bool operator==(const JointSchedule&) const = default;
};

// Supplies (X, y) batches. Without a pool every request is a fresh draw; with
// a pool every request is served from the same fixed batch.
class DataSource {
 public:
  DataSource(const Target& t, RngStream rng, long pool_size = 0);
  std::pair<Matrix, Vector> draw(long n);
  bool reusing() const { return pool_size_ > 0; }

 private:
  const Target& t_;
  RngStream rng_;
  long pool_size_;
  Matrix pool_x_;
  Vector pool_y_;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StageReport {
  std::string stage;
  double wall_time_s = 0.0;
  double loss = 0.0;
  double ustar_overlap_init = 0.0;   // median |<w_i, u*_i>| before the stage
  double ustar_overlap_final = 0.0;  // and after
  std::vector<double> loss_history;
};

struct TrainReport {
  std::vector<StageReport> stages;
  std::vector<std::string> flags;
};

// Unit directions P_{W*} w_i / |P_{W*} w_i| of the current first layer.
Matrix ustar_directions(const Matrix& W1, const Matrix& wstar);
std::vector<double> ustar_overlaps(const Matrix& W1, const Matrix& ustar);

double eta1_of(const LayerwiseSchedule& s, long p2, long width);

StageReport spherical_sgd_layer1(Mlp3Params& m, const Target& t, const LayerwiseSchedule& s, DataSource& data,
                                 const Matrix& ustar, bool allow_any_init = false);
StageReport precond_step_layer2(Mlp3Params& m, const Target& t, const LayerwiseSchedule& s, DataSource& data,
                                RngStream& rng);
StageReport multi_step_layer2(Mlp3Params& m, const Target& t, const LayerwiseSchedule& s, DataSource& data,
                              RngStream& rng);
StageReport ridge_readout(Mlp3Params& m, const LayerwiseSchedule& s, DataSource& data);

struct RidgeFit {
  Vector w;
  double intercept = 0.0;
  double lambda = 0.0;
};
// Ridge with an unpenalized intercept: minimizes |y - Hw - c|^2/n + lambda |w|^2.
RidgeFit ridge_fit(const Matrix& H, const Vector& y, double lambda);
// Picks lambda on an 80/20 split, then refits on all rows.
RidgeFit ridge_select(const Matrix& H, const Vector& y, const std::vector<double>& grid);

// Function-space form of the preconditioned step from W2 = 0:
// h2_i(x) = (eta2 / n) w3_i sigma'(0) Z(x)^T (Z^T Z / n + lambda2 I)^{-1} Z^T y.
Matrix precond_dual_preactivations(const Mlp3Params& m, const Matrix& Xtrain, const Vector& ytrain,
                                   const Matrix& Xeval, double eta2, double lambda2);

StageReport train_joint(Mlp3Params& m, const Matrix& X, const Vector& y, const JointSchedule& s, RngStream& rng,
                        Mlp3Params* last_good = nullptr);

struct TwoLayerReport {
  StageReport stage1;
  StageReport readout;
};
TwoLayerReport train_two_layer(Mlp2Params& m, const Target& t, const LayerwiseSchedule& s, DataSource& data,
                               long p2_for_step);

struct DeepReport {
  std::vector<double> corr;  // |corr(h_{L-1,i}, h*_L)| per neuron
  double median_corr = 0.0;
  bool degenerate = false;
};
struct DeepSchedule {
  long p = 128;       // rows of W
  long p_next = 16;   // rows of W_{L-1}
  long n = 97;        // batch of the preconditioned step
  double eta_prefactor = 1.0;
  double lambda_multiplier = 0.1;
  long n_eval = 5000;
  bool operator==(const DeepSchedule&) const = default;
};
namespace testing {
// Negative-control fixture: stage-1 steps skip the projection back onto the
// sphere on the calling thread.
void set_skip_renormalization(bool on);
}  // namespace testing

DeepReport deep_precond_experiment(const Target& t, const Activation& act, const DeepSchedule& s, RngStream& rng);

}  // namespace mightlab
