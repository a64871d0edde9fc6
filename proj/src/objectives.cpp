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

#include "advrec/objectives.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cmath>
#include <numeric>

#include "advrec/error.hpp"

namespace advrec {

ObjectiveContext::ObjectiveContext(const RatingMatrix& train, std::vector<Rating> target)
    : n_users_(train.n_users()),
      n_items_(train.n_items()),
      train_(train.entries()),
      target_(std::move(target)) {
  for (const Rating& r : target_) {
    if (r.user < 0 || r.user >= n_users_ || r.item < 0 || r.item >= n_items_)
      throw Error("range", "target tuple index out of range");
  }
  user_ptr_.assign(n_users_ + 1, 0);
  item_ptr_.assign(n_items_ + 1, 0);
  for (const Rating& r : train_) {
    ++user_ptr_[r.user + 1];
    ++item_ptr_[r.item + 1];
  }
  std::partial_sum(user_ptr_.begin(), user_ptr_.end(), user_ptr_.begin());
  std::partial_sum(item_ptr_.begin(), item_ptr_.end(), item_ptr_.begin());
  user_items_.resize(train_.size());
  item_users_.resize(train_.size());
  std::vector<std::size_t> ufill(user_ptr_.begin(), user_ptr_.end() - 1);
  std::vector<std::size_t> ifill(item_ptr_.begin(), item_ptr_.end() - 1);
  // train_ is sorted by (user, item), so both adjacency lists come out sorted.
  for (const Rating& r : train_) {
    user_items_[ufill[r.user]++] = r.item;
    item_users_[ifill[r.item]++] = r.user;
  }
}

std::span<const int> ObjectiveContext::rated_items(int user) const {
  if (user < 0 || user >= n_users_) throw Error("range", "user index out of range");
  return {user_items_.data() + user_ptr_[user], user_items_.data() + user_ptr_[user + 1]};
}

std::span<const int> ObjectiveContext::raters(int item) const {
  if (item < 0 || item >= n_items_) throw Error("range", "item index out of range");
  return {item_users_.data() + item_ptr_[item], item_users_.data() + item_ptr_[item + 1]};
}

bool ObjectiveContext::rated(int user, int item) const {
  auto items = rated_items(user);
  return std::binary_search(items.begin(), items.end(), item);
}

namespace {

std::vector<int> complement(std::span<const int> sorted, int n) {
  std::vector<int> out;
  out.reserve(n - sorted.size());
  std::size_t p = 0;
  for (int i = 0; i < n; ++i) {
    if (p < sorted.size() && sorted[p] == i) {
      ++p;
      continue;
    }
    out.push_back(i);
  }
  return out;
}

}  // namespace

std::vector<int> ObjectiveContext::non_raters(int item) const {
  return complement(raters(item), n_users_);
}

std::vector<int> ObjectiveContext::candidates(int user) const {
  return complement(rated_items(user), n_items_);
}

double eval_point(const FactorModel& model, const ObjectiveContext& ctx, int user, int item) {
  if (ctx.rated(user, item))
    throw Error("range", "point objective on a rated pair (user " + std::to_string(user) +
                             ", item " + std::to_string(item) + ")");
  return predict(model, user, item);
}

double eval_item_mean(const FactorModel& model, const ObjectiveContext& ctx, int item) {
  const std::vector<int> users = ctx.non_raters(item);
  if (users.empty()) throw Error("empty", "every user rated item " + std::to_string(item));
  double sum = 0.0;
  for (int u : users) sum += predict(model, u, item);
  return sum / static_cast<double>(users.size());
}

int top_user(const FactorModel& model, const ObjectiveContext& ctx, int item) {
  const std::vector<int> users = ctx.non_raters(item);
  if (users.empty()) throw Error("empty", "every user rated item " + std::to_string(item));
  int best = users.front();
  double best_score = predict(model, best, item);
  for (int u : users) {
    const double s = predict(model, u, item);
    if (s > best_score) {
      best = u;
      best_score = s;
    }
  }
  return best;
}

namespace {

bool is_member(const GroupSpec& g, int index) {
  return std::binary_search(g.members.begin(), g.members.end(), index);
}

int axis_index(const GroupSpec& g, const Rating& r) {
  return g.axis == Axis::kUsers ? r.user : r.item;
}

ObjectiveValue mean_of(std::vector<double> values) {
  ObjectiveValue v;
  v.value = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  v.per_element = std::move(values);
  return v;
}

}  // namespace

ObjectiveValue eval_group(const FactorModel& model, const GroupSpec& group, GroupMetric metric,
                          std::span<const Rating> tuples) {
  std::vector<double> values;
  for (const Rating& r : tuples) {
    if (!is_member(group, axis_index(group, r))) continue;
    const double score = predict(model, r.user, r.item);
    values.push_back(metric == GroupMetric::kMeanScore ? score : std::abs(r.value - score));
  }
  if (values.empty()) throw Error("empty", "group '" + group.label + "' has no tuples");
  return mean_of(std::move(values));
}

namespace {

// Position of `item` in the user's candidate ranking (0 = best), using the
// same order as top_k: score descending, index ascending.
std::size_t candidate_rank(const FactorModel& model, std::span<const int> candidates, int user,
                           int item) {
  const double s = predict(model, user, item);
  std::size_t rank = 0;
  for (int j : candidates) {
    if (j == item) continue;
    const double t = predict(model, user, j);
    if (t > s || (t == s && j < item)) ++rank;
  }
  return rank;
}

}  // namespace

ObjectiveValue eval_hit_rate(const FactorModel& model, const ObjectiveContext& ctx,
                             const GroupSpec& group, int k, bool smooth) {
  if (group.axis != Axis::kUsers) throw Error("config", "hit rate needs a user group");
  if (k < 1) throw Error("range", "hit rate k must be >= 1");
  std::vector<double> values;
  for (const Rating& r : ctx.target()) {
    if (!is_member(group, r.user)) continue;
    if (smooth) {
      values.push_back(predict(model, r.user, r.item));
      continue;
    }
    const std::vector<int> cand = ctx.candidates(r.user);
    values.push_back(candidate_rank(model, cand, r.user, r.item) < static_cast<std::size_t>(k)
                         ? 1.0
                         : 0.0);
  }
  if (values.empty()) throw Error("empty", "group '" + group.label + "' has no held-out tuples");
  return mean_of(std::move(values));
}

FairnessGap eval_fairness_gap(const FactorModel& model, const GroupSpec& a, const GroupSpec& b,
                              std::span<const Rating> tuples) {
  FairnessGap g;
  g.mae_a = eval_group(model, a, GroupMetric::kMae, tuples).value;
  g.mae_b = eval_group(model, b, GroupMetric::kMae, tuples).value;
  g.gap = std::abs(g.mae_a - g.mae_b);
  g.worse = g.mae_a >= g.mae_b ? 0 : 1;
  return g;
}

std::vector<int> rank_loss(const FactorModel& model, const ObjectiveContext& ctx, int user,
                           int item, std::span<const int> tops) {
  if (ctx.rated(user, item)) throw Error("range", "rank loss on a rated item");
  const std::vector<int> cand = ctx.candidates(user);
  const std::size_t rank = candidate_rank(model, cand, user, item);
  std::vector<int> out;
  for (int top : tops) out.push_back(rank < static_cast<std::size_t>(top) ? 1 : 0);
  return out;
}

namespace {

std::vector<GroupSpec> cut_bins(GroupKind kind, Axis axis, const std::vector<double>& stat,
                                int bins) {
  const int n = static_cast<int>(stat.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return stat[a] < stat[b]; });
  std::vector<GroupSpec> groups;
  for (int b = 0; b < bins; ++b) {
    GroupSpec g;
    g.kind = kind;
    g.axis = axis;
    g.index = b;
    const int lo = static_cast<int>(static_cast<long long>(b) * n / bins);
    const int hi = static_cast<int>(static_cast<long long>(b + 1) * n / bins);
    g.members.assign(order.begin() + lo, order.begin() + hi);
    std::sort(g.members.begin(), g.members.end());
    if (!g.members.empty()) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%s %d [%.4g, %.4g]", to_string(kind).c_str(), b,
                    stat[order[lo]], stat[order[hi - 1]]);
      g.label = buf;
    } else {
      g.label = to_string(kind) + " " + std::to_string(b) + " (empty)";
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

struct TupleStatistic {
  std::vector<double> value;   // mean over target tuples, else over train tuples
  std::vector<char> on_target;  // element has at least one target tuple
};

// Mean of score or absolute error per axis element over the target tuples,
// falling back to train tuples for elements without target tuples.
TupleStatistic tuple_statistic(const ObjectiveContext& ctx, const FactorModel& model, Axis axis,
                               bool error) {
  const int n = axis == Axis::kUsers ? ctx.n_users() : ctx.n_items();
  std::vector<double> sum(n, 0.0), fallback_sum(n, 0.0);
  std::vector<int> count(n, 0), fallback_count(n, 0);
  auto add = [&](const Rating& r, std::vector<double>& s, std::vector<int>& c) {
    const int idx = axis == Axis::kUsers ? r.user : r.item;
    const double score = predict(model, r.user, r.item);
    s[idx] += error ? std::abs(r.value - score) : score;
    ++c[idx];
  };
  for (const Rating& r : ctx.target()) add(r, sum, count);
  for (const Rating& r : ctx.train()) add(r, fallback_sum, fallback_count);
  TupleStatistic out{std::vector<double>(n, 0.0), std::vector<char>(n, 0)};
  for (int i = 0; i < n; ++i) {
    if (count[i] > 0) {
      out.value[i] = sum[i] / count[i];
      out.on_target[i] = 1;
    } else if (fallback_count[i] > 0) {
      out.value[i] = fallback_sum[i] / fallback_count[i];
    }
  }
  return out;
}

// Equal-count bins over the elements with target tuples; the rest join the
// first bin whose upper edge is not below their fallback value.
std::vector<GroupSpec> cut_target_bins(GroupKind kind, Axis axis, const TupleStatistic& stat,
                                       int bins) {
  std::vector<int> defined, rest;
  for (int i = 0; i < static_cast<int>(stat.value.size()); ++i)
    (stat.on_target[i] ? defined : rest).push_back(i);
  if (defined.empty() || rest.empty()) return cut_bins(kind, axis, stat.value, bins);
  std::vector<double> sub(defined.size());
  for (std::size_t i = 0; i < defined.size(); ++i) sub[i] = stat.value[defined[i]];
  std::vector<GroupSpec> groups = cut_bins(kind, axis, sub, bins);
  std::vector<double> upper(bins, -INFINITY);
  for (GroupSpec& g : groups) {
    for (int& member : g.members) {
      upper[g.index] = std::max(upper[g.index], sub[member]);
      member = defined[member];
    }
  }
  for (int b = 1; b < bins; ++b) upper[b] = std::max(upper[b], upper[b - 1]);
  for (int i : rest) {
    int b = 0;
    while (b < bins - 1 && upper[b] < stat.value[i]) ++b;
    groups[b].members.push_back(i);
  }
  for (GroupSpec& g : groups) std::sort(g.members.begin(), g.members.end());
  return groups;
}

}  // namespace

std::vector<GroupSpec> build_groups(GroupKind kind, Axis axis, const ObjectiveContext& ctx,
                                    const SideInfo& side, const FactorModel& model_before) {
  switch (kind) {
    case GroupKind::kScoreDecile:
      return cut_target_bins(kind, axis, tuple_statistic(ctx, model_before, axis, false), 10);
    case GroupKind::kErrorDecile:
      return cut_target_bins(kind, axis, tuple_statistic(ctx, model_before, axis, true), 10);
    case GroupKind::kCountDecile:
    case GroupKind::kCountQuartile: {
      const int n = axis == Axis::kUsers ? ctx.n_users() : ctx.n_items();
      std::vector<double> stat(n);
      for (int i = 0; i < n; ++i)
        stat[i] = static_cast<double>(axis == Axis::kUsers ? ctx.rated_items(i).size()
                                                           : ctx.raters(i).size());
      return cut_bins(kind, axis, stat, kind == GroupKind::kCountDecile ? 10 : 4);
    }
    case GroupKind::kAgeDecile: {
      if (axis != Axis::kUsers) throw Error("config", "age groups are over users");
      if (!side.user_age) throw Error("config", "dataset has no user ages");
      std::vector<double> stat(side.user_age->begin(), side.user_age->end());
      return cut_bins(kind, axis, stat, 10);
    }
    case GroupKind::kGender: {
      if (axis != Axis::kUsers) throw Error("config", "gender groups are over users");
      if (!side.user_gender) throw Error("config", "dataset has no user genders");
      std::vector<GroupSpec> groups(2);
      const char* labels[2] = {"male", "female"};
      for (int g = 0; g < 2; ++g) {
        groups[g].kind = kind;
        groups[g].axis = axis;
        groups[g].index = g;
        groups[g].label = labels[g];
      }
      const auto& gender = *side.user_gender;
      for (int u = 0; u < static_cast<int>(gender.size()); ++u)
        groups[gender[u] == Gender::kMale ? 0 : 1].members.push_back(u);
      return groups;
    }
    case GroupKind::kGenre: {
      if (axis != Axis::kItems) throw Error("config", "genre groups are over items");
      if (!side.item_genres) throw Error("config", "dataset has no item genres");
      std::vector<GroupSpec> groups(kNumGenres);
      for (int g = 0; g < kNumGenres; ++g) {
        groups[g].kind = kind;
        groups[g].axis = axis;
        groups[g].index = g;
        groups[g].label = kGenreNames[g];
      }
      const auto& genres = *side.item_genres;
      for (int j = 0; j < static_cast<int>(genres.size()); ++j)
        for (int g = 0; g < kNumGenres; ++g)
          if (genres[j].test(g)) groups[g].members.push_back(j);
      return groups;
    }
  }
  throw Error("config", "unknown group kind");
}

ObjectiveValue evaluate_objective(const AttackObjective& o, const FactorModel& model,
                                  const ObjectiveContext& ctx) {
  auto need_group = [&]() -> const GroupSpec& {
    if (!o.group) throw Error("config", to_string(o.intent) + " needs a group");
    return *o.group;
  };
  switch (o.intent) {
    case Intent::kPointScore:
      return {eval_point(model, ctx, o.user, o.item), {}};
    case Intent::kItemMean:
      return {eval_item_mean(model, ctx, o.item), {}};
    case Intent::kGroupMeanScore:
      return eval_group(model, need_group(), GroupMetric::kMeanScore, ctx.target());
    case Intent::kGroupMae:
      return eval_group(model, need_group(), GroupMetric::kMae, ctx.target());
    case Intent::kHitRate:
      return eval_hit_rate(model, ctx, need_group(), o.hit_k, o.smooth_hit_rate);
    case Intent::kFairnessGap: {
      if (!o.other) throw Error("config", "fairness_gap needs two groups");
      const FairnessGap g = eval_fairness_gap(model, need_group(), *o.other, ctx.target());
      return {g.gap, {g.mae_a, g.mae_b}};
    }
  }
  throw Error("config", "unknown intent");
}

double adversarial_loss(const AttackObjective& o, const FactorModel& model,
                        const ObjectiveContext& ctx) {
  const double v = evaluate_objective(o, model, ctx).value;
  return o.direction == Direction::kMaximize ? -v : v;
}

double attack_difference(double before, double after) {
  if (!std::isfinite(before)) throw Error("range", "attack_difference: before is not finite");
  return before - after;
}

double percent_improved(double before, double delta) {
  if (!std::isfinite(before)) throw Error("range", "percent_improved: before is not finite");
  if (before == 0.0) throw Error("range", "percent_improved: undefined for before = 0");
  return delta * 100.0 / std::abs(before);
}

namespace {

template <typename E, std::size_t N>
E parse_enum(const std::string& s, const std::array<std::pair<E, const char*>, N>& table,
             const char* what) {
  for (const auto& [e, name] : table)
    if (s == name) return e;
  throw Error("config", std::string("unknown ") + what + " '" + s + "'");
}

template <typename E, std::size_t N>
std::string enum_name(E e, const std::array<std::pair<E, const char*>, N>& table) {
  for (const auto& [v, name] : table)
    if (v == e) return name;
  return "?";
}

constexpr std::array<std::pair<GroupKind, const char*>, 7> kGroupKinds{{
    {GroupKind::kScoreDecile, "score_decile"},
    {GroupKind::kErrorDecile, "error_decile"},
    {GroupKind::kCountDecile, "count_decile"},
    {GroupKind::kCountQuartile, "count_quartile"},
    {GroupKind::kAgeDecile, "age_decile"},
    {GroupKind::kGenre, "genre"},
    {GroupKind::kGender, "gender"},
}};
constexpr std::array<std::pair<Axis, const char*>, 2> kAxes{{
    {Axis::kUsers, "users"},
    {Axis::kItems, "items"},
}};
constexpr std::array<std::pair<Intent, const char*>, 6> kIntents{{
    {Intent::kPointScore, "point_score"},
    {Intent::kItemMean, "item_mean"},
    {Intent::kGroupMeanScore, "group_mean_score"},
    {Intent::kGroupMae, "group_mae"},
    {Intent::kHitRate, "hit_rate"},
    {Intent::kFairnessGap, "fairness_gap"},
}};
constexpr std::array<std::pair<Direction, const char*>, 2> kDirections{{
    {Direction::kMinimize, "minimize"},
    {Direction::kMaximize, "maximize"},
}};

}  // namespace

std::string to_string(GroupKind kind) { return enum_name(kind, kGroupKinds); }
std::string to_string(Axis axis) { return enum_name(axis, kAxes); }
std::string to_string(Intent intent) { return enum_name(intent, kIntents); }
std::string to_string(Direction direction) { return enum_name(direction, kDirections); }
GroupKind parse_group_kind(const std::string& s) { return parse_enum(s, kGroupKinds, "group kind"); }
Axis parse_axis(const std::string& s) { return parse_enum(s, kAxes, "axis"); }
Intent parse_intent(const std::string& s) { return parse_enum(s, kIntents, "intent"); }
Direction parse_direction(const std::string& s) { return parse_enum(s, kDirections, "direction"); }

}  // namespace advrec
