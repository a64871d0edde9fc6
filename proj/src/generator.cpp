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

#include "advrec/generator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <queue>

#include <json.hpp>

#include "advrec/distmetrics.hpp"
#include "advrec/error.hpp"

namespace advrec {

namespace {

constexpr double kLeakySlope = 0.2;

Matrix activate(const Matrix& pre, Activation act) {
  switch (act) {
    case Activation::kIdentity: return pre;
    case Activation::kRelu: return pre.cwiseMax(0.0);
    case Activation::kLeakyRelu:
      return pre.unaryExpr([](double v) { return v > 0.0 ? v : kLeakySlope * v; });
    case Activation::kTanh: return pre.array().tanh().matrix();
  }
  return pre;
}

// dL/dpre from dL/dpost.
Matrix activation_backward(const Matrix& pre, const Matrix& post, const Matrix& dpost,
                           Activation act) {
  switch (act) {
    case Activation::kIdentity: return dpost;
    case Activation::kRelu:
      return dpost.cwiseProduct(pre.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
    case Activation::kLeakyRelu:
      return dpost.cwiseProduct(
          pre.unaryExpr([](double v) { return v > 0.0 ? 1.0 : kLeakySlope; }));
    case Activation::kTanh:
      return dpost.cwiseProduct((1.0 - post.array().square()).matrix());
  }
  return dpost;
}

Matrix affine(const Matrix& x, const Dense& layer) {
  Matrix y = x * layer.W.transpose();
  y.rowwise() += layer.b.transpose();
  return y;
}

Dense make_dense(int in, int out, Rng& rng) {
  // Uniform(-1/sqrt(in), 1/sqrt(in)) for weights and biases.
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  Dense d{Matrix(out, in), Vector(out)};
  for (Eigen::Index i = 0; i < d.W.size(); ++i) d.W.data()[i] = bound * (2.0 * rng.uniform() - 1.0);
  for (Eigen::Index i = 0; i < d.b.size(); ++i) d.b[i] = bound * (2.0 * rng.uniform() - 1.0);
  return d;
}

}  // namespace

TwoLayerNet TwoLayerNet::make(int in, int hidden, int out, Activation hidden_act,
                              Activation output_act, Rng& rng) {
  if (in <= 0 || hidden <= 0 || out <= 0) throw Error("range", "network layer sizes must be positive");
  TwoLayerNet net;
  net.hidden = make_dense(in, hidden, rng);
  net.output = make_dense(hidden, out, rng);
  net.hidden_act = hidden_act;
  net.output_act = output_act;
  return net;
}

Matrix TwoLayerNet::forward(const Matrix& x) const {
  return activate(affine(activate(affine(x, hidden), hidden_act), output), output_act);
}

TwoLayerNet::Cache TwoLayerNet::forward_cached(const Matrix& x) const {
  Cache c;
  c.input = x;
  c.hidden_pre = affine(x, hidden);
  c.hidden = activate(c.hidden_pre, hidden_act);
  c.output_pre = affine(c.hidden, output);
  c.output = activate(c.output_pre, output_act);
  return c;
}

TwoLayerNet::Grads TwoLayerNet::backward(const Cache& c, const Matrix& doutput) const {
  Grads g;
  const Matrix dout_pre = activation_backward(c.output_pre, c.output, doutput, output_act);
  g.dW2.noalias() = dout_pre.transpose() * c.hidden;
  g.db2 = dout_pre.colwise().sum().transpose();
  Matrix dhidden = dout_pre * output.W;
  const Matrix dhidden_pre = activation_backward(c.hidden_pre, c.hidden, dhidden, hidden_act);
  g.dW1.noalias() = dhidden_pre.transpose() * c.input;
  g.db1 = dhidden_pre.colwise().sum().transpose();
  g.dinput.noalias() = dhidden_pre * hidden.W;
  return g;
}

std::size_t TwoLayerNet::parameter_count() const {
  return hidden.W.size() + hidden.b.size() + output.W.size() + output.b.size();
}

std::vector<double> TwoLayerNet::flatten() const {
  std::vector<double> p;
  p.reserve(parameter_count());
  auto push = [&](const double* data, Eigen::Index n) { p.insert(p.end(), data, data + n); };
  push(hidden.W.data(), hidden.W.size());
  push(hidden.b.data(), hidden.b.size());
  push(output.W.data(), output.W.size());
  push(output.b.data(), output.b.size());
  return p;
}

void TwoLayerNet::unflatten(const std::vector<double>& p) {
  if (p.size() != parameter_count()) throw Error("range", "parameter vector has wrong length");
  std::size_t off = 0;
  auto pull = [&](double* data, Eigen::Index n) {
    std::copy(p.begin() + off, p.begin() + off + n, data);
    off += n;
  };
  pull(hidden.W.data(), hidden.W.size());
  pull(hidden.b.data(), hidden.b.size());
  pull(output.W.data(), output.W.size());
  pull(output.b.data(), output.b.size());
}

namespace {

// Inclusion probabilities min(1, c * w_j) summing to `length`, for weights
// sorted in descending order. Writes into `pi` (same order as `sorted`).
void capped_inclusion(const std::vector<double>& sorted, const std::vector<double>& suffix,
                      int length, std::vector<double>& pi) {
  const std::size_t n = sorted.size();
  pi.assign(n, 0.0);
  if (length <= 0) return;
  if (static_cast<std::size_t>(length) >= n) {
    pi.assign(n, 1.0);
    return;
  }
  // t items are capped at 1; the rest share length - t in proportion to w.
  for (std::size_t t = 0; t < n; ++t) {
    const double c = (length - static_cast<double>(t)) / suffix[t];
    if (c * sorted[t] <= 1.0) {
      for (std::size_t j = 0; j < t; ++j) pi[j] = 1.0;
      for (std::size_t j = t; j < n; ++j) pi[j] = c * sorted[j];
      return;
    }
  }
  pi.assign(n, 1.0);
}

}  // namespace

FakeProfileMatrix empirical_sample(const RatingMatrix& data, int k, std::uint64_t seed) {
  if (k < 1) throw Error("range", "empirical_sample: k must be >= 1");
  if (data.size() == 0) throw Error("empty", "empirical_sample: dataset has no entries");
  Rng rng(seed);
  const int m = data.n_items();
  const std::vector<int> user_counts = data.user_counts();
  const std::vector<int> popularity = data.item_counts();
  std::vector<std::array<int, 5>> hist(m, std::array<int, 5>{});
  for (const Rating& r : data.entries()) ++hist[r.item][r.value - 1];

  // Items in descending popularity (ties by index); unrated items never appear.
  std::vector<int> order;
  for (int j = 0; j < m; ++j)
    if (popularity[j] > 0) order.push_back(j);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return popularity[a] > popularity[b]; });
  const std::size_t n = order.size();

  // Selection weights start at popularity and are rescaled until the
  // length-averaged inclusion probability of each item equals its observed
  // rate; without this, capping at 1 starves the most popular items.
  std::vector<int> lengths(user_counts.begin(), user_counts.end());
  std::sort(lengths.begin(), lengths.end());
  std::vector<std::pair<int, int>> length_freq;
  for (int len : lengths) {
    if (!length_freq.empty() && length_freq.back().first == len) ++length_freq.back().second;
    else length_freq.emplace_back(len, 1);
  }
  const double n_users = static_cast<double>(data.n_users());
  std::vector<double> target(n), weight(n), suffix(n + 1), pi, expected(n);
  for (std::size_t r = 0; r < n; ++r) {
    target[r] = popularity[order[r]] / n_users;
    weight[r] = popularity[order[r]];
  }
  auto refresh_suffix = [&] {
    suffix[n] = 0.0;
    for (std::size_t r = n; r-- > 0;) suffix[r] = suffix[r + 1] + weight[r];
  };
  for (int iter = 0; iter < 200; ++iter) {
    refresh_suffix();
    std::fill(expected.begin(), expected.end(), 0.0);
    for (const auto& [len, freq] : length_freq) {
      capped_inclusion(weight, suffix, len, pi);
      for (std::size_t r = 0; r < n; ++r) expected[r] += freq * pi[r] / n_users;
    }
    double worst = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      worst = std::max(worst, std::abs(expected[r] - target[r]));
      if (expected[r] > 0.0) weight[r] *= target[r] / expected[r];
    }
    // Keep the descending order the capping routine relies on.
    for (std::size_t r = 1; r < n; ++r) weight[r] = std::min(weight[r], weight[r - 1]);
    if (worst < 1e-6) break;
  }
  refresh_suffix();

  RowMatrix z = RowMatrix::Zero(k, m);
  std::vector<std::size_t> perm(n);
  for (int i = 0; i < k; ++i) {
    const int length = user_counts[rng.uniform_index(user_counts.size())];
    capped_inclusion(weight, suffix, length, pi);
    // Systematic sampling over a random item order: exactly `length` items,
    // item r included with probability pi[r].
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    double next = rng.uniform();
    double cumulative = 0.0;
    for (std::size_t r : perm) {
      cumulative += pi[r];
      if (cumulative <= next) continue;
      next += 1.0;
      const int j = order[r];
      const auto& h = hist[j];
      int pick = static_cast<int>(rng.uniform_index(popularity[j]));
      int value = 1;
      for (int b = 0; b < 5; ++b) {
        if (pick < h[b]) {
          value = b + 1;
          break;
        }
        pick -= h[b];
      }
      z(i, j) = value;
    }
  }
  return FakeProfileMatrix(std::move(z), Scale::kRating);
}

Matrix symmetric_profiles(const RatingMatrix& data) {
  Matrix x = Matrix::Constant(data.n_users(), data.n_items(), -1.0);
  for (const Rating& r : data.entries()) x(r.user, r.item) = (r.value - 2.5) / 2.5;
  return x;
}

namespace {

void adam_step(TwoLayerNet& net, const TwoLayerNet::Grads& g, AdamMoments& s, const GanConfig& c) {
  const std::size_t n = net.parameter_count();
  if (s.m.empty()) {
    s.m.assign(n, 0.0);
    s.v.assign(n, 0.0);
  }
  ++s.t;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(s.t));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(s.t));
  std::size_t off = 0;
  auto apply = [&](double* param, const double* grad, Eigen::Index count) {
    for (Eigen::Index i = 0; i < count; ++i, ++off) {
      s.m[off] = c.beta1 * s.m[off] + (1.0 - c.beta1) * grad[i];
      s.v[off] = c.beta2 * s.v[off] + (1.0 - c.beta2) * grad[i] * grad[i];
      const double mhat = s.m[off] / bc1;
      const double vhat = s.v[off] / bc2;
      param[i] -= c.lr * mhat / (std::sqrt(vhat) + 1e-8);
    }
  };
  apply(net.hidden.W.data(), g.dW1.data(), net.hidden.W.size());
  apply(net.hidden.b.data(), g.db1.data(), net.hidden.b.size());
  apply(net.output.W.data(), g.dW2.data(), net.output.W.size());
  apply(net.output.b.data(), g.db2.data(), net.output.b.size());
}

void ema_update(TwoLayerNet& avg, const TwoLayerNet& cur, double decay) {
  avg.hidden.W = decay * avg.hidden.W + (1.0 - decay) * cur.hidden.W;
  avg.hidden.b = decay * avg.hidden.b + (1.0 - decay) * cur.hidden.b;
  avg.output.W = decay * avg.output.W + (1.0 - decay) * cur.output.W;
  avg.output.b = decay * avg.output.b + (1.0 - decay) * cur.output.b;
}

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Mean binary cross-entropy on logits against a constant label, and its
// gradient with respect to the logits.
double bce_logits(const Matrix& logits, double label, Matrix& dlogits) {
  const double n = static_cast<double>(logits.rows());
  double loss = 0.0;
  dlogits.resize(logits.rows(), 1);
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double x = logits(i, 0);
    loss += label > 0.5 ? softplus(-x) : softplus(x);
    dlogits(i, 0) = (sigmoid(x) - label) / n;
  }
  return loss / n;
}

Matrix noise_batch(Rng& rng, int rows, int dim) {
  Matrix z(rows, dim);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = rng.normal();
  return z;
}

}  // namespace

GeneratorModel init_gan(const RatingMatrix& data, const GanConfig& config) {
  if (data.size() == 0) throw Error("empty", "train_gan: dataset has no entries");
  if (config.batch < 1 || config.batch > data.n_users())
    throw Error("range", "train_gan: batch must lie in [1, n_users]");
  if (config.noise_dim < 1 || config.hidden < 1 || config.epochs < 0 || !(config.lr > 0.0))
    throw Error("range", "train_gan: invalid configuration");
  Rng rng(config.seed);
  GeneratorModel model;
  model.config = config;
  const int m = data.n_items();
  model.generator =
      TwoLayerNet::make(config.noise_dim, config.hidden, m, Activation::kRelu, Activation::kTanh, rng);
  model.discriminator =
      TwoLayerNet::make(m, config.hidden, 1, Activation::kLeakyRelu, Activation::kIdentity, rng);
  // Start the generator at the per-item mean profile so early samples are
  // mostly unrated instead of mid-scale noise.
  const Matrix real = symmetric_profiles(data);
  const Vector mean = real.colwise().mean().transpose();
  for (int j = 0; j < m; ++j) model.generator.output.b[j] = std::atanh(std::clamp(mean[j], -0.995, 0.995));
  model.sampler = model.generator;
  return model;
}

namespace {

void train_epochs_impl(GeneratorModel& model, const Matrix& real, int epochs) {
  const GanConfig& c = model.config;
  const int n = static_cast<int>(real.rows());
  const int batch = c.batch;
  // Each epoch's stream depends only on (seed, epoch index).
  std::vector<int> order(n);
  Matrix dlogits;
  for (int e = 0; e < epochs; ++e) {
    Rng rng(c.seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(model.epochs_done + 1)));
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    double d_sum = 0.0, g_sum = 0.0;
    int steps = 0;
    for (int start = 0; start + batch <= n; start += batch) {
      Matrix xb(batch, real.cols());
      for (int i = 0; i < batch; ++i) xb.row(i) = real.row(order[start + i]);

      // Discriminator step on real and detached fake batches.
      const Matrix fake = model.generator.forward(noise_batch(rng, batch, c.noise_dim));
      auto real_cache = model.discriminator.forward_cached(xb);
      const double loss_real = bce_logits(real_cache.output, 1.0, dlogits);
      auto g_real = model.discriminator.backward(real_cache, dlogits);
      auto fake_cache = model.discriminator.forward_cached(fake);
      const double loss_fake = bce_logits(fake_cache.output, 0.0, dlogits);
      auto g_fake = model.discriminator.backward(fake_cache, dlogits);
      g_real.dW1 += g_fake.dW1;
      g_real.db1 += g_fake.db1;
      g_real.dW2 += g_fake.dW2;
      g_real.db2 += g_fake.db2;
      adam_step(model.discriminator, g_real, model.d_moments, c);

      // Generator step through the updated discriminator.
      auto gen_cache = model.generator.forward_cached(noise_batch(rng, batch, c.noise_dim));
      auto disc_cache = model.discriminator.forward_cached(gen_cache.output);
      const double loss_g = bce_logits(disc_cache.output, 1.0, dlogits);
      const auto through_d = model.discriminator.backward(disc_cache, dlogits);
      const auto g_gen = model.generator.backward(gen_cache, through_d.dinput);
      adam_step(model.generator, g_gen, model.g_moments, c);
      if (c.ema_decay > 0.0) ema_update(model.sampler, model.generator, c.ema_decay);
      else model.sampler = model.generator;

      const double loss_d = loss_real + loss_fake;
      if (!std::isfinite(loss_d) || !std::isfinite(loss_g))
        throw Error("diverged", "GAN loss became non-finite at epoch " +
                                    std::to_string(model.epochs_done) +
                                    "; the learning rate is too high");
      d_sum += loss_d;
      g_sum += loss_g;
      ++steps;
      ++model.steps;
    }
    model.history.push_back({steps ? d_sum / steps : 0.0, steps ? g_sum / steps : 0.0});
    ++model.epochs_done;
  }
}

}  // namespace

void train_gan_epochs(GeneratorModel& model, const Matrix& real, int epochs) {
  if (real.cols() != model.n_items()) throw Error("range", "train_gan: item count mismatch");
  if (real.rows() < model.config.batch) throw Error("range", "train_gan: fewer profiles than batch");
  train_epochs_impl(model, real, epochs);
}

namespace {

constexpr int kScoreSamples = 3;

double score_against(const GeneratorModel& model, const EigenSummary& real, int n,
                     std::uint64_t seed) {
  double total = 0.0;
  for (int s = 0; s < kScoreSamples; ++s) {
    const FakeProfileMatrix fake = to_rating_scale(gan_sample(model, n, seed + s));
    total += max_relative_deviation(real, eigensummary(round_ratings(fake.values())));
  }
  return total / kScoreSamples;
}

}  // namespace

GeneratorModel train_gan(const RatingMatrix& data, const GanConfig& config) {
  if (config.select_every < 0) throw Error("range", "train_gan: select_every must be >= 0");
  GeneratorModel model = init_gan(data, config);
  const Matrix real = symmetric_profiles(data);
  if (config.select_every == 0) {
    train_gan_epochs(model, real, config.epochs);
    return model;
  }
  const EigenSummary real_eigs = eigensummary(dense_ratings(data));
  const std::uint64_t score_seed = config.seed + 1;
  TwoLayerNet best;
  while (model.epochs_done < config.epochs) {
    train_gan_epochs(model, real, std::min(config.select_every, config.epochs - model.epochs_done));
    const double score = score_against(model, real_eigs, data.n_users(), score_seed);
    if (model.selected_epoch < 0 || score < model.selected_score) {
      model.selected_epoch = model.epochs_done;
      model.selected_score = score;
      best = model.sampler;
    }
  }
  if (model.selected_epoch >= 0) model.sampler = best;
  return model;
}

double sampler_score(const GeneratorModel& model, const RatingMatrix& data, std::uint64_t seed) {
  return score_against(model, eigensummary(dense_ratings(data)), data.n_users(), seed);
}

FakeProfileMatrix gan_sample(const GeneratorModel& model, int k, std::uint64_t seed) {
  if (k < 1) throw Error("range", "gan_sample: k must be >= 1");
  Rng rng(seed);
  Matrix out = model.sampler.forward(noise_batch(rng, k, model.config.noise_dim));
  RowMatrix values = out.cwiseMax(-1.0).cwiseMin(1.0);
  return FakeProfileMatrix(std::move(values), Scale::kSymmetric);
}

double discriminator_accuracy(const GeneratorModel& model, const Matrix& real_batch,
                              std::uint64_t seed) {
  Rng rng(seed);
  const int n = static_cast<int>(real_batch.rows());
  const Matrix fake = model.sampler.forward(noise_batch(rng, n, model.config.noise_dim));
  const Matrix pr = model.discriminator.forward(real_batch);
  const Matrix pf = model.discriminator.forward(fake);
  int correct = 0;
  for (int i = 0; i < n; ++i) {
    correct += pr(i, 0) >= 0.0;
    correct += pf(i, 0) < 0.0;
  }
  return static_cast<double>(correct) / (2.0 * n);
}

FakeProfileMatrix to_rating_scale(const FakeProfileMatrix& z) {
  if (z.scale() != Scale::kSymmetric) throw Error("scale", "to_rating_scale expects symmetric scale");
  RowMatrix v = (z.values().array() * 2.5 + 2.5).cwiseMax(0.0).cwiseMin(5.0).matrix();
  return FakeProfileMatrix(std::move(v), Scale::kRating);
}

FakeProfileMatrix to_symmetric_scale(const FakeProfileMatrix& z) {
  if (z.scale() != Scale::kRating) throw Error("scale", "to_symmetric_scale expects rating scale");
  RowMatrix v = ((z.values().array() - 2.5) / 2.5).cwiseMax(-1.0).cwiseMin(1.0).matrix();
  return FakeProfileMatrix(std::move(v), Scale::kSymmetric);
}

namespace {

void write_net(std::ofstream& out, const TwoLayerNet& net) {
  const auto p = net.flatten();
  out.write(reinterpret_cast<const char*>(p.data()), static_cast<std::streamsize>(p.size() * sizeof(double)));
}

void read_net(std::ifstream& in, TwoLayerNet& net) {
  std::vector<double> p(net.parameter_count());
  in.read(reinterpret_cast<char*>(p.data()), static_cast<std::streamsize>(p.size() * sizeof(double)));
  if (!in) throw Error("parse", "generator checkpoint truncated");
  net.unflatten(p);
}

void write_moments(std::ofstream& out, const AdamMoments& a, std::size_t n) {
  std::vector<double> m = a.m, v = a.v;
  m.resize(n, 0.0);
  v.resize(n, 0.0);
  out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(n * sizeof(double)));
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
}

void read_moments(std::ifstream& in, AdamMoments& a, std::size_t n, long t) {
  a.t = t;
  a.m.assign(n, 0.0);
  a.v.assign(n, 0.0);
  in.read(reinterpret_cast<char*>(a.m.data()), static_cast<std::streamsize>(n * sizeof(double)));
  in.read(reinterpret_cast<char*>(a.v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw Error("parse", "generator checkpoint truncated");
  if (t == 0) {
    a.m.clear();
    a.v.clear();
  }
}

}  // namespace

void save_generator(const GeneratorModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write " + path.string());
  const auto& c = model.config;
  nlohmann::json header = {
      {"format", "advrec-generator-v1"}, {"n_items", model.n_items()},
      {"noise_dim", c.noise_dim},        {"hidden", c.hidden},
      {"epochs", c.epochs},              {"batch", c.batch},
      {"lr", c.lr},                      {"beta1", c.beta1},
      {"beta2", c.beta2},                {"ema_decay", c.ema_decay},
      {"seed", c.seed},                  {"epochs_done", model.epochs_done},
      {"steps", model.steps},
      {"g_adam_t", model.g_moments.t},   {"d_adam_t", model.d_moments.t},
      {"select_every", c.select_every},  {"selected_epoch", model.selected_epoch},
      {"selected_score", model.selected_score}};
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& h : model.history) hist.push_back({h.d_loss, h.g_loss});
  header["history"] = hist;
  out << header.dump() << '\n';
  write_net(out, model.generator);
  write_net(out, model.discriminator);
  write_net(out, model.sampler);
  write_moments(out, model.g_moments, model.generator.parameter_count());
  write_moments(out, model.d_moments, model.discriminator.parameter_count());
  if (!out) throw Error("io", "write failed for " + path.string());
}

GeneratorModel load_generator(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing_file", "missing file " + path.string());
  std::string line;
  std::getline(in, line);
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error("parse", path.string() + ": bad generator header: " + e.what());
  }
  if (h.value("format", "") != "advrec-generator-v1")
    throw Error("parse", path.string() + ": not a generator checkpoint");
  GeneratorModel model;
  GanConfig& c = model.config;
  c.noise_dim = h.at("noise_dim");
  c.hidden = h.at("hidden");
  c.epochs = h.at("epochs");
  c.batch = h.at("batch");
  c.lr = h.at("lr");
  c.beta1 = h.at("beta1");
  c.beta2 = h.at("beta2");
  c.ema_decay = h.at("ema_decay");
  c.seed = h.at("seed");
  c.select_every = h.value("select_every", 0);
  model.selected_epoch = h.value("selected_epoch", -1);
  model.selected_score = h.value("selected_score", 0.0);
  model.epochs_done = h.at("epochs_done");
  model.steps = h.at("steps");
  for (const auto& e : h.at("history")) model.history.push_back({e[0], e[1]});
  const int m = h.at("n_items");
  Rng rng(0);
  model.generator = TwoLayerNet::make(c.noise_dim, c.hidden, m, Activation::kRelu, Activation::kTanh, rng);
  model.discriminator = TwoLayerNet::make(m, c.hidden, 1, Activation::kLeakyRelu, Activation::kIdentity, rng);
  model.sampler = model.generator;
  read_net(in, model.generator);
  read_net(in, model.discriminator);
  read_net(in, model.sampler);
  read_moments(in, model.g_moments, model.generator.parameter_count(), h.at("g_adam_t"));
  read_moments(in, model.d_moments, model.discriminator.parameter_count(), h.at("d_adam_t"));
  return model;
}

}  // namespace advrec
