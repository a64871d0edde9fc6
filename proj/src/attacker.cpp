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

#include "advrec/attacker.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "advrec/error.hpp"

namespace advrec {

void AttackConfig::validate() const {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw Error("config", "eta must be >= 0");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error("config", "alpha must be > 0");
  if (K < 1) throw Error("config", "K must be >= 1");
  if (T < 1) throw Error("config", "T must be >= 1");
  if (inner_iters < 0) throw Error("config", "inner_iters must be >= 0");
  if (pre_iters < 0) throw Error("config", "pre_iters must be >= 0");
  if (stop.kind == StopRule::Kind::kRemovedFromTop && stop.top < 1)
    throw Error("config", "removed_from_top needs k >= 1");
}

TrainSet augmented_train_set(std::span<const TrainTuple> real, int n_real, int n_items,
                             const RowMatrix& z) {
  if (z.cols() != n_items) throw Error("range", "fake profiles have the wrong item count");
  std::vector<TrainTuple> tuples(real.begin(), real.end());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      const double r = std::clamp(std::nearbyint(z(i, j)), 0.0, 5.0);
      if (r > 0.0) tuples.push_back({n_real + static_cast<int>(i), static_cast<int>(j), r});
    }
  }
  return TrainSet(n_real + static_cast<int>(z.rows()), n_items, std::move(tuples));
}

EvalOracle::EvalOracle(const RatingMatrix& train, int k, AttackObjective objective,
                       const ObjectiveContext& ctx, int inner_iters)
    : n_real_(train.n_users()),
      n_items_(train.n_items()),
      k_(k),
      objective_(std::move(objective)),
      ctx_(&ctx),
      inner_iters_(inner_iters) {
  if (k < 1) throw Error("range", "oracle needs k >= 1 fake users");
  if (inner_iters < 0) throw Error("range", "inner_iters must be >= 0");
  real_.reserve(train.size());
  for (const Rating& r : train.entries()) real_.push_back({r.user, r.item, double(r.value)});
}

EvalOracle::Result EvalOracle::evaluate(const FactorModel& warm, const RowMatrix& z) const {
  if (z.rows() != k_) throw Error("range", "fake profiles have the wrong row count");
  if (warm.n_users() != n_real_ + k_ || warm.n_items() != n_items_)
    throw Error("range", "warm-start model has the wrong shape");
  const TrainSet train = augmented_train_set(real_, n_real_, n_items_, z);
  Result out{0.0, warm};
  if (inner_iters_ > 0) alt_min_inplace(train, out.model, inner_iters_);
  out.value = adversarial_loss(objective_, out.model, *ctx_);
  return out;
}

std::vector<RowMatrix> svd_directions(const RowMatrix& z, int K) {
  if (K < 1) throw Error("range", "K must be >= 1");
  const Eigen::MatrixXd dense = z;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() == 0 || !(s[0] > 0.0)) throw Error("no_directions", "no directions: z is zero");
  const double tol = s[0] * static_cast<double>(std::max(z.rows(), z.cols())) *
                     std::numeric_limits<double>::epsilon();
  std::vector<RowMatrix> dirs;
  for (Eigen::Index h = 0; h < std::min<Eigen::Index>(K, s.size()); ++h) {
    if (s[h] <= tol) break;
    dirs.emplace_back(svd.matrixU().col(h) * svd.matrixV().col(h).transpose());
  }
  return dirs;
}

ZoEstimate zo_gradient(const std::function<double(const RowMatrix&)>& f, const RowMatrix& z,
                       double alpha, int K) {
  if (!(alpha > 0.0)) throw Error("range", "alpha must be > 0");
  const std::vector<RowMatrix> dirs = svd_directions(z, K);
  ZoEstimate est;
  est.base_value = f(z);
  est.grad = RowMatrix::Zero(z.rows(), z.cols());
  for (const RowMatrix& d : dirs) {
    const double fd = f(z + alpha * d);
    est.grad += ((fd - est.base_value) / alpha) * d;
  }
  est.directions = static_cast<int>(dirs.size());
  return est;
}

OracleEstimate zo_gradient(const EvalOracle& oracle, const FactorModel& warm, const RowMatrix& z,
                           double alpha, int K) {
  OracleEstimate out;
  bool base_done = false;
  auto f = [&](const RowMatrix& point) {
    if (!base_done) {
      EvalOracle::Result r = oracle.evaluate(warm, point);
      out.base_model = std::move(r.model);
      base_done = true;
      return r.value;
    }
    return oracle.evaluate(out.base_model, point).value;
  };
  out.estimate = zo_gradient(f, z, alpha, K);
  return out;
}

RowMatrix zsgd_step(const RowMatrix& z, const RowMatrix& grad, double eta) {
  if (z.rows() != grad.rows() || z.cols() != grad.cols())
    throw Error("range", "zsgd_step: shape mismatch");
  return (z - eta * grad).cwiseMax(0.0).cwiseMin(5.0);
}

FactorModel pretrain(const RatingMatrix& train, int k, const RecommenderConfig& rec,
                     int pre_iters) {
  if (k < 0) throw Error("range", "k must be >= 0");
  const int n_prime = train.n_users() + k;
  FactorModel model = init_model(n_prime, train.n_items(), rec.d, rec.lambda, rec.seed);
  if (pre_iters > 0) {
    const TrainSet set = make_train_set(train.entries(), n_prime, train.n_items());
    alt_min_inplace(set, model, pre_iters);
  }
  return model;
}

namespace {

constexpr std::array<int, 3> kRankTops = {1, 5, 10};

bool should_stop(const AttackConfig& config, const TraceRow& row) {
  switch (config.stop.kind) {
    case StopRule::Kind::kNone: return false;
    case StopRule::Kind::kDeltaGe: return row.delta >= config.stop.threshold;
    case StopRule::Kind::kRemovedFromTop: return false;  // checked by the caller
  }
  return false;
}

}  // namespace

AttackResult run_attack_from(const FactorModel& pretrained, const RatingMatrix& train,
                             const ObjectiveContext& ctx, const AttackObjective& objective,
                             const FakeProfileMatrix& gen_init, const AttackConfig& config,
                             const AttackHooks& hooks) {
  config.validate();
  if (gen_init.scale() != Scale::kRating)
    throw Error("scale", "run_attack expects gen_init in rating scale");
  const int k = gen_init.k();
  if (pretrained.n_users() != train.n_users() + k || pretrained.n_items() != train.n_items())
    throw Error("range", "pretrained model does not have n + k rows");
  if (config.stop.kind == StopRule::Kind::kRemovedFromTop && objective.intent != Intent::kPointScore)
    throw Error("config", "removed_from_top needs a point_score objective");

  AttackResult result;
  result.model_before = pretrained;
  result.z_final = gen_init.values();
  result.model_final = pretrained;
  AttackTrace& trace = result.trace;
  const auto start = std::chrono::steady_clock::now();
  try {
    trace.f_before = adversarial_loss(objective, pretrained, ctx);
    const EvalOracle oracle(train, k, objective, ctx, config.inner_iters);
    const std::vector<ItemMarginal> real_marginals = marginals(train);
    RowMatrix z = gen_init.values();
    FactorModel warm = pretrained;
    trace.stop_reason = "max_iters";
    for (int t = 1; t <= config.T; ++t) {
      const bool last = t == config.T;
      // The final row needs only the base evaluation.
      OracleEstimate est;
      if (last) {
        EvalOracle::Result r = oracle.evaluate(warm, z);
        est.estimate.base_value = r.value;
        est.base_model = std::move(r.model);
      } else {
        est = zo_gradient(oracle, warm, z, config.alpha, config.K);
      }
      TraceRow row;
      row.t = t;
      row.f_A = est.estimate.base_value;
      row.delta = trace.f_before - row.f_A;
      const MeanDistance md = mean_distance(real_marginals, marginals(round_ratings(z)));
      row.mean_tvd = md.mean_tvd;
      row.mean_js = md.mean_js;
      if (objective.intent == Intent::kPointScore) {
        const auto r = rank_loss(est.base_model, ctx, objective.user, objective.item, kRankTops);
        row.rank = std::array<int, 3>{r[0], r[1], r[2]};
      }
      if (hooks.observe) row.extras = hooks.observe(est.base_model);
      row.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      trace.rows.push_back(row);
      result.z_final = z;
      result.model_final = est.base_model;

      if (should_stop(config, row)) {
        trace.stop_reason = "delta_ge";
        break;
      }
      if (config.stop.kind == StopRule::Kind::kRemovedFromTop) {
        const int top = config.stop.top;
        const auto r = rank_loss(est.base_model, ctx, objective.user, objective.item,
                                 std::span<const int>(&top, 1));
        if (r[0] == 0) {
          trace.stop_reason = "removed_from_top";
          break;
        }
      }
      if (last) break;
      z = zsgd_step(z, est.estimate.grad, config.eta);
      warm = std::move(est.base_model);
    }
  } catch (const std::exception& e) {
    trace.stop_reason = std::string("error: ") + e.what();
  }
  result.z_final_rounded = round_ratings(result.z_final);
  return result;
}

AttackResult run_attack(const RatingMatrix& train, const ObjectiveContext& ctx,
                        const AttackObjective& objective, const FakeProfileMatrix& gen_init,
                        const RecommenderConfig& rec, const AttackConfig& config,
                        const AttackHooks& hooks) {
  config.validate();
  const FactorModel pretrained = pretrain(train, gen_init.k(), rec, config.pre_iters);
  return run_attack_from(pretrained, train, ctx, objective, gen_init, config, hooks);
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw Error("range", "pearson: length mismatch");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

namespace {

void summarize(std::vector<ImpactEntry>& entries, int top_n, double& mean, double& top,
               double& bottom) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const ImpactEntry& a, const ImpactEntry& b) { return a.before > b.before; });
  mean = top = bottom = 0.0;
  if (entries.empty()) return;
  for (const auto& e : entries) mean += e.delta;
  mean /= static_cast<double>(entries.size());
  const std::size_t n = std::min<std::size_t>(top_n, entries.size());
  for (std::size_t i = 0; i < n; ++i) {
    top += entries[i].delta;
    bottom += entries[entries.size() - 1 - i].delta;
  }
  top /= static_cast<double>(n);
  bottom /= static_cast<double>(n);
}

}  // namespace

ImpactReport impact_report(const FactorModel& before, const FactorModel& after,
                           const RatingMatrix& train, const ObjectiveContext& ctx, int item,
                           int top_user, int top_n) {
  if (top_n < 1) throw Error("range", "top_n must be >= 1");
  ImpactReport rep;
  rep.item = item;
  rep.top_user = top_user;
  rep.top_n = top_n;

  const RowMatrix ratings = dense_ratings(train);
  const int d = before.rank();
  const int m = train.n_items();
  auto row_span = [](const RowMatrix& mtx, int r, int len) {
    return std::span<const double>(mtx.data() + static_cast<std::size_t>(r) * len, len);
  };
  for (int u : ctx.non_raters(item)) {
    ImpactEntry e;
    e.index = u;
    e.before = predict(before, u, item);
    e.after = predict(after, u, item);
    e.delta = e.before - e.after;
    e.factor_corr = pearson(row_span(before.U, u, d), row_span(before.U, top_user, d));
    e.rating_corr = pearson(row_span(ratings, u, m), row_span(ratings, top_user, m));
    rep.users.push_back(e);
  }
  for (int j : ctx.candidates(top_user)) {
    ImpactEntry e;
    e.index = j;
    e.before = predict(before, top_user, j);
    e.after = predict(after, top_user, j);
    e.delta = e.before - e.after;
    rep.items.push_back(e);
  }
  summarize(rep.users, top_n, rep.mean_delta_users, rep.top_users_delta, rep.bottom_users_delta);
  summarize(rep.items, top_n, rep.mean_delta_items, rep.top_items_delta, rep.bottom_items_delta);
  return rep;
}

TopUserResult top_user_attack(const RatingMatrix& train, const ObjectiveContext& ctx, int item,
                              const FakeProfileMatrix& gen_init, const RecommenderConfig& rec,
                              const AttackConfig& config, int top_n) {
  config.validate();
  const FactorModel pretrained = pretrain(train, gen_init.k(), rec, config.pre_iters);
  AttackObjective objective;
  objective.intent = Intent::kPointScore;
  objective.direction = Direction::kMinimize;
  objective.item = item;
  objective.user = top_user(pretrained, ctx, item);
  TopUserResult out;
  out.attack = run_attack_from(pretrained, train, ctx, objective, gen_init, config);
  out.impact = impact_report(out.attack.model_before, out.attack.model_final, train, ctx, item,
                             objective.user, top_n);
  return out;
}

}  // namespace advrec
