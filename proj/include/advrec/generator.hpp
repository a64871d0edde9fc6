// Copyright 2026 The advrec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "advrec/dataset.hpp"
#include "advrec/profiles.hpp"
#include "advrec/rng.hpp"

namespace advrec {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { kIdentity, kRelu, kLeakyRelu, kTanh };

// Affine layer, y = x W^T + b for a batch x (rows are samples).
struct Dense {
  Matrix W;  // out x in
  Vector b;  // out

  int in() const { return static_cast<int>(W.cols()); }
  int out() const { return static_cast<int>(W.rows()); }
};

// in -> hidden (act) -> out (act). Both networks of the GAN have this shape.
struct TwoLayerNet {
  Dense hidden;
  Dense output;
  Activation hidden_act = Activation::kRelu;
  Activation output_act = Activation::kIdentity;

  struct Cache {
    Matrix input, hidden_pre, hidden, output_pre, output;
  };
  struct Grads {
    Matrix dW1, dW2;
    Vector db1, db2;
    Matrix dinput;
  };

  static TwoLayerNet make(int in, int hidden, int out, Activation hidden_act,
                          Activation output_act, Rng& rng);

  Matrix forward(const Matrix& x) const;
  Cache forward_cached(const Matrix& x) const;
  // Gradients of a scalar loss given dL/d(output).
  Grads backward(const Cache& cache, const Matrix& doutput) const;

  std::size_t parameter_count() const;
  // Flat view in the order W1, b1, W2, b2.
  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& params);
};

struct GanConfig {
  int noise_dim = 100;
  int hidden = 256;
  int epochs = 100;
  int batch = 64;
  double lr = 1e-3;
  double beta1 = 0.5;
  double beta2 = 0.999;
  // Generator weights used for sampling are an exponential moving average of
  // the trained ones; 0 disables averaging.
  double ema_decay = 0.99;
  std::uint64_t seed = 0;
  // When positive, every select_every epochs the sampler is scored by the
  // largest relative deviation of its top Gram eigenvalues from the real ones
  // (n_users samples, averaged over a few draws), and the best-scoring
  // sampler is kept.
  int select_every = 0;
};

struct GanEpochStats {
  double d_loss = 0.0;
  double g_loss = 0.0;
};

struct AdamMoments {
  std::vector<double> m, v;
  long t = 0;
};

struct GeneratorModel {
  GanConfig config;
  TwoLayerNet generator;      // noise -> hidden (ReLU) -> m (tanh)
  TwoLayerNet discriminator;  // m -> hidden (leaky ReLU) -> 1 (logit)
  TwoLayerNet sampler;        // moving average of `generator`
  int epochs_done = 0;
  long steps = 0;
  std::vector<GanEpochStats> history;
  AdamMoments g_moments, d_moments;
  int selected_epoch = -1;  // epoch of the kept sampler under selection
  double selected_score = 0.0;

  int n_items() const { return generator.output.out(); }
};

// Empirical-marginal baseline: profile lengths from the real per-user count
// distribution, items proportional to popularity (without replacement),
// ratings from each item's histogram.
FakeProfileMatrix empirical_sample(const RatingMatrix& data, int k, std::uint64_t seed);

// Dense real profiles in symmetric scale (unrated = -1).
Matrix symmetric_profiles(const RatingMatrix& data);

GeneratorModel init_gan(const RatingMatrix& data, const GanConfig& config);
// Continues training for `epochs` more epochs; alternating D then G updates on
// the non-saturating adversarial loss. Throws Error("diverged") on a non-finite
// loss.
void train_gan_epochs(GeneratorModel& model, const Matrix& real, int epochs);
GeneratorModel train_gan(const RatingMatrix& data, const GanConfig& config);

// Checkpoint score used by selection: max relative eigenvalue deviation of n
// rounded samples against the real profiles.
double sampler_score(const GeneratorModel& model, const RatingMatrix& data, std::uint64_t seed);

FakeProfileMatrix gan_sample(const GeneratorModel& model, int k, std::uint64_t seed);

// Fraction of correctly classified samples (real -> p >= 0.5, fake -> p < 0.5).
double discriminator_accuracy(const GeneratorModel& model, const Matrix& real_batch,
                              std::uint64_t seed);

FakeProfileMatrix to_rating_scale(const FakeProfileMatrix& z);
FakeProfileMatrix to_symmetric_scale(const FakeProfileMatrix& z);

void save_generator(const GeneratorModel& model, const std::filesystem::path& path);
GeneratorModel load_generator(const std::filesystem::path& path);

}  // namespace advrec
