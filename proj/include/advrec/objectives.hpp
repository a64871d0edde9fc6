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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "advrec/dataset.hpp"
#include "advrec/recommender.hpp"

namespace advrec {

enum class Direction { kMinimize, kMaximize };
enum class Axis { kUsers, kItems };
enum class GroupKind {
  kScoreDecile,
  kErrorDecile,
  kCountDecile,
  kCountQuartile,
  kAgeDecile,
  kGenre,
  kGender,
};

struct GroupSpec {
  GroupKind kind = GroupKind::kScoreDecile;
  Axis axis = Axis::kItems;
  int index = 0;
  std::string label;
  std::vector<int> members;  // ascending user or item indices
};

enum class Intent {
  kPointScore,
  kItemMean,
  kGroupMeanScore,
  kGroupMae,
  kHitRate,
  kFairnessGap,
};

struct AttackObjective {
  Intent intent = Intent::kPointScore;
  Direction direction = Direction::kMinimize;
  int user = -1;  // point_score
  int item = -1;  // point_score, item_mean
  std::optional<GroupSpec> group;
  std::optional<GroupSpec> other;  // second group of fairness_gap
  int hit_k = 10;
  // Mean predicted score of the held-out items instead of the 0/1 hit rate.
  bool smooth_hit_rate = false;
};

struct ObjectiveValue {
  double value = 0.0;
  std::vector<double> per_element;  // value is their mean when non-empty
};

// Read-only lookups shared by every evaluation: who rated what in train, and
// the tuples an E2 objective is scored on.
class ObjectiveContext {
 public:
  ObjectiveContext(const RatingMatrix& train, std::vector<Rating> target = {});

  int n_users() const { return n_users_; }
  int n_items() const { return n_items_; }
  const std::vector<Rating>& target() const { return target_; }

  bool rated(int user, int item) const;
  std::span<const int> rated_items(int user) const;
  std::span<const int> raters(int item) const;
  // Real users who did not rate `item` in train, ascending.
  std::vector<int> non_raters(int item) const;
  // Items `user` did not rate in train, ascending.
  std::vector<int> candidates(int user) const;
  const std::vector<Rating>& train() const { return train_; }

 private:
  int n_users_;
  int n_items_;
  std::vector<Rating> train_;
  std::vector<Rating> target_;
  std::vector<std::size_t> user_ptr_, item_ptr_;
  std::vector<int> user_items_, item_users_;
};

double eval_point(const FactorModel& model, const ObjectiveContext& ctx, int user, int item);
double eval_item_mean(const FactorModel& model, const ObjectiveContext& ctx, int item);
int top_user(const FactorModel& model, const ObjectiveContext& ctx, int item);

enum class GroupMetric { kMeanScore, kMae };

// Over the tuples whose user (or item, per the group's axis) is a member.
// per_element holds one entry per matching tuple.
ObjectiveValue eval_group(const FactorModel& model, const GroupSpec& group, GroupMetric metric,
                          std::span<const Rating> tuples);

// Per member user with a held-out tuple: 1 if the held-out item is among the
// top k of that user's candidates. Users without a held-out tuple are skipped.
ObjectiveValue eval_hit_rate(const FactorModel& model, const ObjectiveContext& ctx,
                             const GroupSpec& group, int k = 10, bool smooth = false);

struct FairnessGap {
  double gap = 0.0;
  double mae_a = 0.0;
  double mae_b = 0.0;
  // 0 when group a has the larger error, 1 for group b.
  int worse = 0;
};
FairnessGap eval_fairness_gap(const FactorModel& model, const GroupSpec& a, const GroupSpec& b,
                              std::span<const Rating> tuples);

// 1 if item is within the user's top-n candidates, per requested n.
std::vector<int> rank_loss(const FactorModel& model, const ObjectiveContext& ctx, int user,
                           int item, std::span<const int> tops);

// Groups over users or items. Decile kinds rank a per-element statistic from
// the before-attack model (mean score / mean absolute error on the element's
// target tuples, falling back to its train tuples) and cut into equal-count
// bins, ties broken by index.
std::vector<GroupSpec> build_groups(GroupKind kind, Axis axis, const ObjectiveContext& ctx,
                                    const SideInfo& side, const FactorModel& model_before);

// Raw objective value (not sign-adjusted).
ObjectiveValue evaluate_objective(const AttackObjective& objective, const FactorModel& model,
                                  const ObjectiveContext& ctx);
// The quantity the attacker minimizes: value, or -value for maximize.
double adversarial_loss(const AttackObjective& objective, const FactorModel& model,
                        const ObjectiveContext& ctx);

double attack_difference(double before, double after);
double percent_improved(double before, double delta);

std::string to_string(GroupKind kind);
std::string to_string(Axis axis);
std::string to_string(Intent intent);
std::string to_string(Direction direction);
GroupKind parse_group_kind(const std::string& s);
Axis parse_axis(const std::string& s);
Intent parse_intent(const std::string& s);
Direction parse_direction(const std::string& s);

}  // namespace advrec
