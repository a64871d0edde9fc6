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

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "advrec/dataset.hpp"
#include "advrec/distmetrics.hpp"
#include "advrec/objectives.hpp"
#include "advrec/profiles.hpp"
#include "advrec/recommender.hpp"

namespace advrec {

struct RecommenderConfig {
  int d = 40;
  double lambda = 0.001;
  std::uint64_t seed = 0;
};

struct StopRule {
  enum class Kind { kNone, kDeltaGe, kRemovedFromTop };
  Kind kind = Kind::kNone;
  double threshold = 1.0;  // delta_ge
  int top = 10;            // removed_from_top

  static StopRule none() { return {}; }
  static StopRule delta_ge(double t) { return {Kind::kDeltaGe, t, 10}; }
  static StopRule removed_from_top(int k) { return {Kind::kRemovedFromTop, 1.0, k}; }
};

struct AttackConfig {
  double eta = 100.0;
  double alpha = 50.0;
  int K = 5;
  int T = 21;
  int inner_iters = 5;
  int pre_iters = 10;
  StopRule stop;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TraceRow {
  int t = 0;
  double f_A = 0.0;  // adversarial loss (negated objective for maximize intents)
  double delta = 0.0;
  double mean_tvd = 0.0;
  double mean_js = 0.0;
  std::optional<std::array<int, 3>> rank;  // rank loss @1, @5, @10 for point targets
  double seconds = 0.0;
  std::vector<double> extras;  // caller-defined series, see AttackHooks
};

struct AttackTrace {
  std::vector<TraceRow> rows;
  double f_before = 0.0;
  std::string stop_reason;  // max_iters, delta_ge, removed_from_top, or error: ...
  bool failed() const { return stop_reason.rfind("error", 0) == 0; }
};

// Scores fake profiles by retraining the recommender on real + fake tuples.
class EvalOracle {
 public:
  EvalOracle(const RatingMatrix& train, int k, AttackObjective objective,
             const ObjectiveContext& ctx, int inner_iters);

  struct Result {
    double value = 0.0;  // adversarial loss
    FactorModel model;
  };

  // z in rating scale: rounded to integers in [0,5], nonzero entries become
  // tuples of fake users n..n+k-1, then inner_iters alt-min sweeps from `warm`.
  Result evaluate(const FactorModel& warm, const RowMatrix& z) const;

  int k() const { return k_; }
  int n_real() const { return n_real_; }
  const AttackObjective& objective() const { return objective_; }
  const ObjectiveContext& context() const { return *ctx_; }

 private:
  std::vector<TrainTuple> real_;
  int n_real_;
  int n_items_;
  int k_;
  AttackObjective objective_;
  const ObjectiveContext* ctx_;
  int inner_iters_;
};

TrainSet augmented_train_set(std::span<const TrainTuple> real, int n_real, int n_items,
                             const RowMatrix& z);

// Unit-Frobenius rank-one directions u_h v_h^T from the top singular pairs of
// z, truncated to its numerical rank. Throws Error("no directions") for z = 0.
std::vector<RowMatrix> svd_directions(const RowMatrix& z, int K);

struct ZoEstimate {
  RowMatrix grad;
  double base_value = 0.0;
  int directions = 0;
};

// (1/alpha) sum_h [f(z + alpha D_h) - f(z)] D_h. f(z) is evaluated first.
ZoEstimate zo_gradient(const std::function<double(const RowMatrix&)>& f, const RowMatrix& z,
                       double alpha, int K);

struct OracleEstimate {
  ZoEstimate estimate;
  FactorModel base_model;  // trained on z; warm start for the perturbed evaluations
};
OracleEstimate zo_gradient(const EvalOracle& oracle, const FactorModel& warm, const RowMatrix& z,
                           double alpha, int K);

// Gradient step followed by projection onto [0,5].
RowMatrix zsgd_step(const RowMatrix& z, const RowMatrix& grad, double eta);

// Real-data model with k empty fake rows, trained for pre_iters sweeps.
FactorModel pretrain(const RatingMatrix& train, int k, const RecommenderConfig& rec,
                     int pre_iters);

struct AttackHooks {
  // Extra per-row values computed on the row's model (e.g. test-set metrics).
  std::function<std::vector<double>(const FactorModel&)> observe;
};

struct AttackResult {
  AttackTrace trace;
  RowMatrix z_final;          // continuous, rating scale
  RowMatrix z_final_rounded;  // integers in [0,5]
  FactorModel model_before;
  FactorModel model_final;  // trained on z_final
};

// Row t (1-based) is the evaluation of the t-th iterate; row 1 is gen_init.
// Rows are logged before the stop rule is checked. Errors end the run with a
// partial trace and stop_reason "error: ...".
AttackResult run_attack_from(const FactorModel& pretrained, const RatingMatrix& train,
                             const ObjectiveContext& ctx, const AttackObjective& objective,
                             const FakeProfileMatrix& gen_init, const AttackConfig& config,
                             const AttackHooks& hooks = {});
AttackResult run_attack(const RatingMatrix& train, const ObjectiveContext& ctx,
                        const AttackObjective& objective, const FakeProfileMatrix& gen_init,
                        const RecommenderConfig& rec, const AttackConfig& config,
                        const AttackHooks& hooks = {});

struct ImpactEntry {
  int index = 0;  // user (non-raters of h) or item (unrated by the top user)
  double before = 0.0;
  double after = 0.0;
  double delta = 0.0;
  double factor_corr = 0.0;  // users only: Pearson of U rows with the top user
  double rating_corr = 0.0;  // users only: Pearson of rating rows with the top user
};

struct ImpactReport {
  int item = 0;
  int top_user = 0;
  std::vector<ImpactEntry> users;  // every non-rater of item, by descending before score
  std::vector<ImpactEntry> items;  // every item unrated by top_user, same order
  double mean_delta_users = 0.0;
  double top_users_delta = 0.0;
  double bottom_users_delta = 0.0;
  double mean_delta_items = 0.0;
  double top_items_delta = 0.0;
  double bottom_items_delta = 0.0;
  int top_n = 5;
};

ImpactReport impact_report(const FactorModel& before, const FactorModel& after,
                           const RatingMatrix& train, const ObjectiveContext& ctx, int item,
                           int top_user, int top_n = 5);

struct TopUserResult {
  AttackResult attack;
  ImpactReport impact;
};

TopUserResult top_user_attack(const RatingMatrix& train, const ObjectiveContext& ctx, int item,
                              const FakeProfileMatrix& gen_init, const RecommenderConfig& rec,
                              const AttackConfig& config, int top_n = 5);

double pearson(std::span<const double> a, std::span<const double> b);

}  // namespace advrec
