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

#include "advrec/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "advrec/distmetrics.hpp"
#include "advrec/error.hpp"
#include "advrec/rng.hpp"

namespace advrec {

namespace {

constexpr std::array<std::pair<Family, const char*>, 9> kFamilies{{
    {Family::kSingleUi, "single_ui"},
    {Family::kTopItemRemoval, "top_item_removal"},
    {Family::kItemMean, "item_mean"},
    {Family::kTopUser, "top_user"},
    {Family::kGroupScore, "group_score"},
    {Family::kGroupError, "group_error"},
    {Family::kHitRateImprove, "hit_rate_improve"},
    {Family::kErrorImprove, "error_improve"},
    {Family::kFairness, "fairness"},
}};

bool is_group_family(Family f) {
  return f == Family::kGroupScore || f == Family::kGroupError || f == Family::kHitRateImprove ||
         f == Family::kErrorImprove || f == Family::kFairness;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::string to_string(Family family) {
  for (const auto& [f, name] : kFamilies)
    if (f == family) return name;
  return "?";
}

Family parse_family(const std::string& s) {
  for (const auto& [f, name] : kFamilies)
    if (s == name) return f;
  throw Error("config", "unknown experiment family '" + s + "'");
}

void ExperimentSpec::validate() const {
  attack.validate();
  if (sample_count < 0) throw Error("config", "sample_count must be >= 0");
  if (rec.d < 1) throw Error("config", "recommender d must be >= 1");
  if (!(rec.lambda >= 0.0)) throw Error("config", "recommender lambda must be >= 0");
  if (generator.k < 1) throw Error("config", "generator k must be >= 1");
  switch (family) {
    case Family::kSingleUi:
    case Family::kTopItemRemoval:
    case Family::kItemMean:
    case Family::kTopUser:
      if (split != SplitMode::kE1) throw Error("config", to_string(family) + " runs on the E1 split");
      break;
    case Family::kHitRateImprove:
      if (split != SplitMode::kE2a) throw Error("config", "hit_rate_improve needs the E2a split");
      if (group_axis != Axis::kUsers) throw Error("config", "hit_rate_improve groups users");
      break;
    case Family::kFairness:
      if (split == SplitMode::kE1) throw Error("config", "fairness needs a target set");
      if (group_kind != GroupKind::kGender)
        throw Error("config", "fairness compares the two gender groups");
      break;
    default:
      if (split == SplitMode::kE1) throw Error("config", to_string(family) + " needs a target set");
  }
}

ExperimentSpec preset(Family family) {
  ExperimentSpec s;
  s.family = family;
  s.data_dir = "data/ml-100k";
  s.generator.mode = GeneratorSpec::Mode::kGan;
  s.generator.k = 64;
  s.generator.gan.epochs = 600;
  s.generator.gan.select_every = 25;
  s.rec = {40, 0.001, 0};
  s.attack.eta = 100.0;
  s.attack.alpha = 50.0;
  s.attack.K = 5;
  s.attack.T = 21;
  s.attack.inner_iters = 5;
  s.attack.pre_iters = 10;
  auto group_setting = [&](SplitMode split, GroupKind kind, Axis axis) {
    s.split = split;
    s.group_kind = kind;
    s.group_axis = axis;
    s.rec = {100, 0.1, 0};
    s.attack.pre_iters = 100;
    s.attack.eta = 1000.0;
    s.attack.K = 5;
    s.attack.alpha = 50.0;
    s.attack.T = 30;
    s.attack.stop = StopRule::none();
    s.sample_count = 0;
  };
  switch (family) {
    case Family::kSingleUi:
      s.sample_count = 20;
      s.attack.stop = StopRule::delta_ge(1.0);
      break;
    case Family::kTopItemRemoval:
      s.sample_count = 10;
      s.attack.stop = StopRule::removed_from_top(10);
      break;
    case Family::kItemMean:
      s.sample_count = 5;
      s.attack.eta = 1000.0;
      s.attack.alpha = 500.0;
      s.attack.stop = StopRule::delta_ge(1.0);
      break;
    case Family::kTopUser:
      s.sample_count = 3;
      s.attack.stop = StopRule::delta_ge(1.0);
      break;
    case Family::kGroupScore:
      group_setting(SplitMode::kE2b, GroupKind::kScoreDecile, Axis::kItems);
      break;
    case Family::kGroupError:
      group_setting(SplitMode::kE2b, GroupKind::kErrorDecile, Axis::kItems);
      break;
    case Family::kHitRateImprove:
      group_setting(SplitMode::kE2a, GroupKind::kCountDecile, Axis::kUsers);
      break;
    case Family::kErrorImprove:
      group_setting(SplitMode::kE2b, GroupKind::kCountDecile, Axis::kItems);
      break;
    case Family::kFairness:
      group_setting(SplitMode::kE2b, GroupKind::kGender, Axis::kUsers);
      break;
  }
  return s;
}

FakeProfileMatrix make_gen_init(const GeneratorSpec& spec, const RatingMatrix& data) {
  switch (spec.mode) {
    case GeneratorSpec::Mode::kEmpirical:
      return empirical_sample(data, spec.k, spec.sample_seed);
    case GeneratorSpec::Mode::kGan: {
      const GeneratorModel model = train_gan(data, spec.gan);
      return to_rating_scale(gan_sample(model, spec.k, spec.sample_seed));
    }
    case GeneratorSpec::Mode::kFile: {
      if (spec.path.extension() == ".csv") return read_fake_csv(spec.path, data.n_items(), spec.k);
      const GeneratorModel model = load_generator(spec.path);
      if (model.n_items() != data.n_items())
        throw Error("config", "generator checkpoint was trained on a different item count");
      return to_rating_scale(gan_sample(model, spec.k, spec.sample_seed));
    }
  }
  throw Error("config", "unknown generator mode");
}

namespace {

RatingMatrix with_entries(const RatingMatrix& like, std::vector<Rating> entries) {
  return RatingMatrix(like.n_users(), like.n_items(), std::move(entries), like.user_ids(),
                      like.item_ids());
}

double signed_value(Direction d, double raw) { return d == Direction::kMaximize ? -raw : raw; }

std::optional<double> percent_or_null(double before, double delta) {
  if (before == 0.0 || !std::isfinite(before) || !std::isfinite(delta)) return std::nullopt;
  return percent_improved(before, delta);
}

// Index of the first row with the smallest f_A.
std::size_t best_row(const AttackTrace& trace) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < trace.rows.size(); ++i)
    if (trace.rows[i].f_A < trace.rows[best].f_A) best = i;
  return best;
}

void fill_from_trace(TargetOutcome& o, const AttackTrace& trace) {
  o.stop_reason = trace.stop_reason;
  o.f_before = trace.f_before;
  if (trace.failed()) o.error = trace.stop_reason.substr(std::string("error: ").size());
  if (trace.rows.empty()) return;
  const std::size_t b = best_row(trace);
  o.f_best = trace.rows[b].f_A;
  o.f_final = trace.rows.back().f_A;
  o.delta = trace.f_before - o.f_best;
  o.best_t = trace.rows[b].t;
  o.iterations = trace.rows.back().t;
  o.final_mean_tvd = trace.rows.back().mean_tvd;
  o.final_mean_js = trace.rows.back().mean_js;
}

struct Prepared {
  const Dataset* dataset = nullptr;
  Dataset owned;
  DatasetSplit split;
  RatingMatrix train;
  FakeProfileMatrix gen_init;
};

void prepare(const ExperimentSpec& spec, const SharedInputs& shared, Prepared& p) {
  if (shared.dataset) {
    p.dataset = &*shared.dataset;
  } else {
    p.owned = ingest(spec.format, spec.data_dir);
    p.dataset = &p.owned;
  }
  const RatingMatrix& all = p.dataset->ratings;
  p.split = split(all, spec.split, spec.seed);
  p.train = with_entries(all, p.split.train);
  p.gen_init = shared.gen_init ? *shared.gen_init : make_gen_init(spec.generator, all);
  if (p.gen_init.n_items() != all.n_items())
    throw Error("config", "fake profiles have the wrong item count");
  if (p.gen_init.scale() != Scale::kRating) p.gen_init = to_rating_scale(p.gen_init);
}

nlohmann::json spec_json(const ExperimentSpec& s) {
  nlohmann::json j;
  j["family"] = to_string(s.family);
  j["split"] = to_string(s.split);
  j["sample_count"] = s.sample_count;
  j["seed"] = s.seed;
  j["recommender"] = {{"d", s.rec.d},
                      {"lambda", s.rec.lambda},
                      {"seed", s.rec.seed},
                      {"pre_iters", s.attack.pre_iters},
                      {"inner_iters", s.attack.inner_iters}};
  nlohmann::json stop;
  switch (s.attack.stop.kind) {
    case StopRule::Kind::kNone: stop = {{"kind", "none"}}; break;
    case StopRule::Kind::kDeltaGe: stop = {{"kind", "delta_ge"}, {"threshold", s.attack.stop.threshold}}; break;
    case StopRule::Kind::kRemovedFromTop: stop = {{"kind", "removed_from_top"}, {"k", s.attack.stop.top}}; break;
  }
  j["attacker"] = {{"eta", s.attack.eta}, {"alpha", s.attack.alpha}, {"K", s.attack.K},
                   {"T", s.attack.T},     {"stop", stop},            {"seed", s.attack.seed}};
  const char* mode = s.generator.mode == GeneratorSpec::Mode::kGan         ? "gan"
                     : s.generator.mode == GeneratorSpec::Mode::kEmpirical ? "empirical"
                                                                           : "file";
  j["generator"] = {{"mode", mode}, {"k", s.generator.k}, {"sample_seed", s.generator.sample_seed}};
  if (s.generator.mode == GeneratorSpec::Mode::kGan) {
    const GanConfig& g = s.generator.gan;
    j["generator"]["gan"] = {{"epochs", g.epochs}, {"hidden", g.hidden}, {"noise_dim", g.noise_dim},
                             {"batch", g.batch},   {"lr", g.lr},         {"seed", g.seed},
                             {"select_every", g.select_every}};
  }
  if (is_group_family(s.family))
    j["group"] = {{"kind", to_string(s.group_kind)}, {"axis", to_string(s.group_axis)}};
  j["js_log_base"] = "e";
  return j;
}

TargetOutcome run_point_target(const ExperimentSpec& spec, const Prepared& p,
                               const ObjectiveContext& ctx, const FactorModel& pretrained,
                               int user, int item, ExperimentResult& out) {
  AttackObjective objective;
  objective.intent = Intent::kPointScore;
  objective.direction = Direction::kMinimize;
  objective.user = user;
  objective.item = item;
  TargetOutcome o;
  o.user_id = p.train.user_ids()[user];
  o.item_id = p.train.item_ids()[item];
  o.label = "user " + std::to_string(o.user_id) + " item " + std::to_string(o.item_id);
  const AttackResult r =
      run_attack_from(pretrained, p.train, ctx, objective, p.gen_init, spec.attack);
  fill_from_trace(o, r.trace);
  o.before_metric = r.trace.f_before;
  o.percent_target = percent_or_null(o.f_before, o.delta);
  if (spec.family == Family::kTopItemRemoval) o.success = r.trace.stop_reason == "removed_from_top";
  else o.success = r.trace.stop_reason == "delta_ge";
  if (spec.family == Family::kTopUser)
    o.impact = impact_report(r.model_before, r.model_final, p.train, ctx, item, user);
  out.traces.push_back(r.trace);
  out.extra_names.emplace_back();
  out.final_z.push_back(r.z_final_rounded);
  return o;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const SharedInputs& shared) {
  spec.validate();
  Prepared p;
  prepare(spec, shared, p);
  ExperimentResult out;
  RunSummary& summary = out.summary;
  summary.family = spec.family;
  summary.config = spec_json(spec);
  const MeanDistance md = mean_distance(p.train, p.gen_init);
  summary.gen_mean_tvd = md.mean_tvd;
  summary.gen_mean_js = md.mean_js;

  const ObjectiveContext ctx(p.train, p.split.target);
  const ObjectiveContext test_ctx(p.train, p.split.test);
  const FactorModel pretrained = pretrain(p.train, p.gen_init.k(), spec.rec, spec.attack.pre_iters);
  Rng rng(spec.seed);

  auto record = [&](TargetOutcome o) {
    summary.successes += o.success ? 1 : 0;
    summary.outcomes.push_back(std::move(o));
  };

  switch (spec.family) {
    case Family::kSingleUi:
    case Family::kItemMean:
    case Family::kTopUser: {
      std::vector<int> items;
      for (int j = 0; j < p.train.n_items(); ++j)
        if (static_cast<int>(ctx.raters(j).size()) < p.train.n_users()) items.push_back(j);
      if (items.empty() && spec.sample_count > 0) throw Error("empty", "no item has a non-rater");
      for (int s = 0; s < spec.sample_count; ++s) {
        const int item = items[rng.uniform_index(items.size())];
        try {
          if (spec.family == Family::kSingleUi) {
            const std::vector<int> users = ctx.non_raters(item);
            const int user = users[rng.uniform_index(users.size())];
            record(run_point_target(spec, p, ctx, pretrained, user, item, out));
          } else if (spec.family == Family::kTopUser) {
            const int user = top_user(pretrained, ctx, item);
            record(run_point_target(spec, p, ctx, pretrained, user, item, out));
          } else {
            AttackObjective objective;
            objective.intent = Intent::kItemMean;
            objective.item = item;
            TargetOutcome o;
            o.item_id = p.train.item_ids()[item];
            o.label = "item " + std::to_string(o.item_id);
            const AttackResult r =
                run_attack_from(pretrained, p.train, ctx, objective, p.gen_init, spec.attack);
            fill_from_trace(o, r.trace);
            o.before_metric = r.trace.f_before;
            o.percent_target = percent_or_null(o.f_before, o.delta);
            o.success = r.trace.stop_reason == "delta_ge";
            out.traces.push_back(r.trace);
            out.extra_names.emplace_back();
            out.final_z.push_back(r.z_final_rounded);
            record(std::move(o));
          }
        } catch (const std::exception& e) {
          TargetOutcome o;
          o.item_id = p.train.item_ids()[item];
          o.label = "item " + std::to_string(o.item_id);
          o.error = e.what();
          o.stop_reason = std::string("error: ") + e.what();
          out.traces.emplace_back();
          out.extra_names.emplace_back();
          out.final_z.emplace_back();
          record(std::move(o));
        }
      }
      break;
    }
    case Family::kTopItemRemoval: {
      for (int s = 0; s < spec.sample_count; ++s) {
        const int user = static_cast<int>(rng.uniform_index(p.train.n_users()));
        const std::vector<int> cand = ctx.candidates(user);
        if (cand.empty()) continue;
        const int item = top_k(pretrained, user, cand, 1).front();
        record(run_point_target(spec, p, ctx, pretrained, user, item, out));
      }
      break;
    }
    default: {
      std::vector<GroupSpec> groups =
          build_groups(spec.group_kind, spec.group_axis, ctx, p.dataset->side, pretrained);
      AttackObjective base;
      base.smooth_hit_rate = spec.smooth_hit_rate;
      switch (spec.family) {
        case Family::kGroupScore: base.intent = Intent::kGroupMeanScore; break;
        case Family::kGroupError:
          base.intent = Intent::kGroupMae;
          base.direction = Direction::kMaximize;
          break;
        case Family::kHitRateImprove:
          base.intent = Intent::kHitRate;
          base.direction = Direction::kMaximize;
          break;
        case Family::kErrorImprove: base.intent = Intent::kGroupMae; break;
        default: base.intent = Intent::kFairnessGap; break;
      }
      std::vector<AttackObjective> objectives;
      if (spec.family == Family::kFairness) {
        base.group = groups.at(0);
        base.other = groups.at(1);
        objectives.push_back(base);
      } else {
        for (const GroupSpec& g : groups) {
          if (!spec.group_indices.empty() &&
              std::find(spec.group_indices.begin(), spec.group_indices.end(), g.index) ==
                  spec.group_indices.end())
            continue;
          AttackObjective o = base;
          o.group = g;
          objectives.push_back(o);
        }
      }
      for (const AttackObjective& objective : objectives) {
        TargetOutcome o;
        o.group_index = objective.group->index;
        o.label = spec.family == Family::kFairness
                      ? objective.group->label + " vs " + objective.other->label
                      : objective.group->label;
        AttackHooks hooks;
        std::vector<std::string> names;
        if (spec.family == Family::kFairness) {
          names = {"target_mae_" + objective.group->label, "target_mae_" + objective.other->label,
                   "test_mae_" + objective.group->label, "test_mae_" + objective.other->label,
                   "test_gap"};
          hooks.observe = [&](const FactorModel& m) {
            const FairnessGap t = eval_fairness_gap(m, *objective.group, *objective.other, ctx.target());
            std::vector<double> v = {t.mae_a, t.mae_b, kNaN, kNaN, kNaN};
            try {
              const FairnessGap s =
                  eval_fairness_gap(m, *objective.group, *objective.other, test_ctx.target());
              v[2] = s.mae_a;
              v[3] = s.mae_b;
              v[4] = s.gap;
            } catch (const Error&) {
            }
            return v;
          };
        } else {
          names = {"test_value"};
          hooks.observe = [&](const FactorModel& m) {
            try {
              return std::vector<double>{evaluate_objective(objective, m, test_ctx).value};
            } catch (const Error&) {
              return std::vector<double>{kNaN};
            }
          };
        }
        const AttackResult r =
            run_attack_from(pretrained, p.train, ctx, objective, p.gen_init, spec.attack, hooks);
        fill_from_trace(o, r.trace);
        if (!r.trace.failed() || !r.trace.rows.empty()) {
          o.before_metric = signed_value(objective.direction, r.trace.f_before);
          o.percent_target = percent_or_null(o.f_before, o.delta);
          o.success = !r.trace.rows.empty() && o.delta > 0.0;
          const std::vector<double> before_extras = hooks.observe(pretrained);
          const std::size_t test_col = spec.family == Family::kFairness ? 4 : 0;
          const double tb = before_extras[test_col];
          if (std::isfinite(tb)) {
            o.test_before = tb;
            if (!r.trace.rows.empty()) {
              const double ta = r.trace.rows[best_row(r.trace)].extras[test_col];
              o.test_at_best = ta;
              const Direction dir =
                  spec.family == Family::kFairness ? Direction::kMinimize : objective.direction;
              o.percent_test = percent_or_null(signed_value(dir, tb),
                                               signed_value(dir, tb) - signed_value(dir, ta));
            }
          }
        }
        out.traces.push_back(r.trace);
        out.extra_names.push_back(names);
        out.final_z.push_back(r.z_final_rounded);
        record(std::move(o));
      }
    }
  }
  summary.sample_count = static_cast<int>(summary.outcomes.size());
  if (summary.sample_count > 0)
    summary.success_rate = static_cast<double>(summary.successes) / summary.sample_count;
  return out;
}

namespace {

nlohmann::json num_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json opt_json(const std::optional<double>& v) {
  return v ? num_or_null(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json summary_json(const RunSummary& s) {
  nlohmann::json j;
  j["family"] = to_string(s.family);
  j["sample_count"] = s.sample_count;
  j["successes"] = s.successes;
  j["success_rate"] = opt_json(s.success_rate);
  j["gen_mean_tvd"] = num_or_null(s.gen_mean_tvd);
  j["gen_mean_js"] = num_or_null(s.gen_mean_js);
  j["config"] = s.config;
  nlohmann::json outcomes = nlohmann::json::array();
  for (const TargetOutcome& o : s.outcomes) {
    nlohmann::json r;
    r["label"] = o.label;
    r["user_id"] = o.user_id;
    r["item_id"] = o.item_id;
    r["group_index"] = o.group_index;
    r["success"] = o.success;
    r["f_before"] = num_or_null(o.f_before);
    r["f_best"] = num_or_null(o.f_best);
    r["f_final"] = num_or_null(o.f_final);
    r["delta"] = num_or_null(o.delta);
    r["best_t"] = o.best_t;
    r["iterations"] = o.iterations;
    r["before_metric"] = num_or_null(o.before_metric);
    r["percent_target_improved"] = opt_json(o.percent_target);
    r["test_before"] = opt_json(o.test_before);
    r["test_at_best"] = opt_json(o.test_at_best);
    r["percent_test_improved"] = opt_json(o.percent_test);
    r["final_mean_tvd"] = num_or_null(o.final_mean_tvd);
    r["final_mean_js"] = num_or_null(o.final_mean_js);
    r["stop_reason"] = o.stop_reason;
    if (!o.error.empty()) r["error"] = o.error;
    if (o.impact) {
      const ImpactReport& m = *o.impact;
      r["impact"] = {{"top_user", m.top_user},
                     {"top_n", m.top_n},
                     {"mean_delta_users", m.mean_delta_users},
                     {"top_users_delta", m.top_users_delta},
                     {"bottom_users_delta", m.bottom_users_delta},
                     {"mean_delta_items", m.mean_delta_items},
                     {"top_items_delta", m.top_items_delta},
                     {"bottom_items_delta", m.bottom_items_delta}};
    }
    outcomes.push_back(r);
  }
  j["outcomes"] = outcomes;
  return j;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot write " + path.string());
  return out;
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

}  // namespace

void write_trace_csv(const AttackTrace& trace, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "t,f_A,delta,mean_tvd,mean_js,rank1,rank5,rank10,seconds\n";
  for (const TraceRow& r : trace.rows) {
    out << r.t << ',' << fmt(r.f_A) << ',' << fmt(r.delta) << ',' << fmt(r.mean_tvd) << ','
        << fmt(r.mean_js);
    for (int i = 0; i < 3; ++i) {
      out << ',';
      if (r.rank) out << (*r.rank)[i];
    }
    out << ',' << fmt(r.seconds) << '\n';
  }
  if (!out) throw Error("io", "write failed for " + path.string());
}

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing_file", "missing file " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "t,f_A,delta,mean_tvd,mean_js,rank1,rank5,rank10,seconds")
    throw Error("parse", path.string() + ": unexpected trace header");
  std::vector<TraceRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 9) throw Error("parse", path.string() + ":" + std::to_string(line_no) + ": expected 9 fields");
    try {
      TraceRow r;
      r.t = std::stoi(f[0]);
      r.f_A = std::stod(f[1]);
      r.delta = std::stod(f[2]);
      r.mean_tvd = std::stod(f[3]);
      r.mean_js = std::stod(f[4]);
      if (!f[5].empty()) r.rank = std::array<int, 3>{std::stoi(f[5]), std::stoi(f[6]), std::stoi(f[7])};
      r.seconds = f[8].empty() ? 0.0 : std::stod(f[8]);
      rows.push_back(r);
    } catch (const std::logic_error&) {
      throw Error("parse", path.string() + ":" + std::to_string(line_no) + ": malformed number");
    }
  }
  return rows;
}

void report(const ExperimentResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out = open_out(out_dir / "summary.json");
    out << summary_json(result.summary).dump(2) << '\n';
  }
  const RunSummary& s = result.summary;
  for (std::size_t i = 0; i < result.traces.size(); ++i) {
    const AttackTrace& trace = result.traces[i];
    if (trace.rows.empty()) continue;
    const std::string stem = std::to_string(i);
    write_trace_csv(trace, out_dir / "traces" / (stem + ".csv"));
    const auto& names = result.extra_names[i];
    if (!names.empty()) {
      std::ofstream out = open_out(out_dir / "traces" / (stem + "_extras.csv"));
      out << 't';
      for (const auto& n : names) out << ',' << n;
      out << '\n';
      for (const TraceRow& r : trace.rows) {
        out << r.t;
        for (double v : r.extras) out << ',' << fmt(v);
        out << '\n';
      }
    }
    if (result.final_z[i].size() > 0) {
      std::filesystem::create_directories(out_dir / "fake");
      write_fake_csv(FakeProfileMatrix(result.final_z[i], Scale::kRating),
                     out_dir / "fake" / (stem + ".csv"));
    }
  }
  const Family f = s.family;
  if (is_group_family(f) && !s.outcomes.empty()) {
    std::ofstream out = open_out(out_dir / "groups.csv");
    out << "group_index,group_label,before_metric,test_before_metric,percent_target_improved,"
           "percent_test_improved,best_t\n";
    for (const TargetOutcome& o : s.outcomes) {
      std::string label = o.label;
      std::replace(label.begin(), label.end(), ',', ';');
      out << o.group_index << ",\"" << label << "\"," << fmt(o.before_metric) << ','
          << fmt(o.test_before) << ',' << fmt(o.percent_target) << ',' << fmt(o.percent_test)
          << ',' << o.best_t << '\n';
    }
  }
  if (f == Family::kFairness && !result.traces.empty() && !result.traces[0].rows.empty()) {
    std::ofstream out = open_out(out_dir / "groups_trace.csv");
    out << 't';
    for (const auto& n : result.extra_names[0]) out << ',' << n;
    out << '\n';
    for (const TraceRow& r : result.traces[0].rows) {
      out << r.t;
      for (double v : r.extras) out << ',' << fmt(v);
      out << '\n';
    }
  }
  if (f == Family::kTopUser) {
    for (std::size_t i = 0; i < s.outcomes.size(); ++i) {
      if (!s.outcomes[i].impact) continue;
      const ImpactReport& m = *s.outcomes[i].impact;
      {
        std::ofstream out = open_out(out_dir / "impact" / (std::to_string(i) + "_users.csv"));
        out << "rank,user,before,after,delta,factor_corr,rating_corr\n";
        for (std::size_t r = 0; r < m.users.size(); ++r) {
          const ImpactEntry& e = m.users[r];
          out << r << ',' << e.index << ',' << fmt(e.before) << ',' << fmt(e.after) << ','
              << fmt(e.delta) << ',' << fmt(e.factor_corr) << ',' << fmt(e.rating_corr) << '\n';
        }
      }
      std::ofstream out = open_out(out_dir / "impact" / (std::to_string(i) + "_items.csv"));
      out << "rank,item,before,after,delta\n";
      for (std::size_t r = 0; r < m.items.size(); ++r) {
        const ImpactEntry& e = m.items[r];
        out << r << ',' << e.index << ',' << fmt(e.before) << ',' << fmt(e.after) << ','
            << fmt(e.delta) << '\n';
      }
    }
  }
}

namespace {

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

StopRule parse_stop(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "none") return StopRule::none();
    throw Error("config", "stop must be an object or \"none\"");
  }
  const std::string kind = j.value("kind", "none");
  if (kind == "none") return StopRule::none();
  if (kind == "delta_ge") return StopRule::delta_ge(j.value("threshold", 1.0));
  if (kind == "removed_from_top") return StopRule::removed_from_top(j.value("k", 10));
  throw Error("config", "unknown stop kind '" + kind + "'");
}

void apply_blocks(const nlohmann::json& c, ExperimentSpec& s) {
  if (c.contains("dataset")) {
    const auto& d = c.at("dataset");
    if (d.contains("format")) s.format = parse_dataset_format(d.at("format").get<std::string>());
    if (d.contains("dir")) s.data_dir = d.at("dir").get<std::string>();
  }
  if (c.contains("split")) {
    const auto& d = c.at("split");
    if (d.is_string()) s.split = parse_split_mode(d.get<std::string>());
    else if (d.contains("mode")) s.split = parse_split_mode(d.at("mode").get<std::string>());
    if (d.is_object()) maybe(d, "seed", s.seed);
  }
  if (c.contains("recommender")) {
    const auto& d = c.at("recommender");
    maybe(d, "d", s.rec.d);
    maybe(d, "lambda", s.rec.lambda);
    maybe(d, "seed", s.rec.seed);
    maybe(d, "pre_iters", s.attack.pre_iters);
    maybe(d, "inner_iters", s.attack.inner_iters);
  }
  if (c.contains("generator")) {
    const auto& d = c.at("generator");
    if (d.contains("mode")) {
      const std::string mode = d.at("mode");
      if (mode == "gan") s.generator.mode = GeneratorSpec::Mode::kGan;
      else if (mode == "empirical") s.generator.mode = GeneratorSpec::Mode::kEmpirical;
      else if (mode == "file") s.generator.mode = GeneratorSpec::Mode::kFile;
      else throw Error("config", "unknown generator mode '" + mode + "'");
    }
    maybe(d, "k", s.generator.k);
    maybe(d, "sample_seed", s.generator.sample_seed);
    if (d.contains("path")) s.generator.path = d.at("path").get<std::string>();
    GanConfig& g = s.generator.gan;
    maybe(d, "epochs", g.epochs);
    maybe(d, "hidden", g.hidden);
    maybe(d, "noise_dim", g.noise_dim);
    maybe(d, "batch", g.batch);
    maybe(d, "lr", g.lr);
    maybe(d, "ema_decay", g.ema_decay);
    maybe(d, "select_every", g.select_every);
    maybe(d, "seed", g.seed);
  }
  if (c.contains("attacker")) {
    const auto& d = c.at("attacker");
    maybe(d, "eta", s.attack.eta);
    maybe(d, "alpha", s.attack.alpha);
    maybe(d, "K", s.attack.K);
    maybe(d, "T", s.attack.T);
    maybe(d, "seed", s.attack.seed);
    if (d.contains("stop")) s.attack.stop = parse_stop(d.at("stop"));
  }
}

}  // namespace

ExperimentSpec parse_experiment_overrides(ExperimentSpec s, const nlohmann::json& o) {
  try {
    apply_blocks(o, s);
    maybe(o, "sample_count", s.sample_count);
    maybe(o, "seed", s.seed);
    maybe(o, "smooth_hit_rate", s.smooth_hit_rate);
    if (o.contains("group")) {
      const auto& g = o.at("group");
      if (g.contains("kind")) s.group_kind = parse_group_kind(g.at("kind").get<std::string>());
      if (g.contains("axis")) s.group_axis = parse_axis(g.at("axis").get<std::string>());
    }
    maybe(o, "group_indices", s.group_indices);
  } catch (const nlohmann::json::exception& e) {
    throw Error("config", std::string("bad override: ") + e.what());
  }
  return s;
}

AttackJob parse_attack_config(const nlohmann::json& c) {
  AttackJob job;
  job.spec = preset(Family::kSingleUi);
  job.spec.split = SplitMode::kE1;
  try {
    apply_blocks(c, job.spec);
    if (!c.contains("objective")) throw Error("config", "attack config needs an objective block");
    job.objective = c.at("objective");
    job.spec.attack.validate();
  } catch (const nlohmann::json::exception& e) {
    throw Error("config", std::string("bad attack config: ") + e.what());
  }
  return job;
}

namespace {

int index_of_id(const std::vector<std::int64_t>& ids, std::int64_t id, const char* what) {
  auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) throw Error("config", std::string("unknown ") + what + " id " + std::to_string(id));
  return static_cast<int>(it - ids.begin());
}

GroupSpec resolve_group(const nlohmann::json& g, const ObjectiveContext& ctx, const SideInfo& side,
                        const FactorModel& model) {
  const GroupKind kind = parse_group_kind(g.at("kind").get<std::string>());
  Axis axis = kind == GroupKind::kGender || kind == GroupKind::kAgeDecile ? Axis::kUsers : Axis::kItems;
  if (g.contains("axis")) axis = parse_axis(g.at("axis").get<std::string>());
  const int index = g.value("index", 0);
  std::vector<GroupSpec> groups = build_groups(kind, axis, ctx, side, model);
  if (index < 0 || index >= static_cast<int>(groups.size()))
    throw Error("config", "group index " + std::to_string(index) + " out of range");
  return groups[index];
}

}  // namespace

AttackRun run_attack_job(const AttackJob& job, const SharedInputs& shared) {
  Prepared p;
  prepare(job.spec, shared, p);
  AttackRun run;
  run.split = p.split;
  const ObjectiveContext ctx(p.train, p.split.target);
  const FactorModel pretrained =
      pretrain(p.train, p.gen_init.k(), job.spec.rec, job.spec.attack.pre_iters);
  const nlohmann::json& o = job.objective;
  AttackObjective& objective = run.objective;
  try {
    objective.intent = parse_intent(o.at("intent").get<std::string>());
    objective.direction = parse_direction(o.value("direction", std::string("minimize")));
    objective.hit_k = o.value("hit_k", 10);
    objective.smooth_hit_rate = o.value("smooth", false);
    if (o.contains("target")) {
      const auto& t = o.at("target");
      if (t.contains("item_id"))
        objective.item = index_of_id(p.train.item_ids(), t.at("item_id").get<std::int64_t>(), "item");
      if (t.contains("user_id"))
        objective.user = index_of_id(p.train.user_ids(), t.at("user_id").get<std::int64_t>(), "user");
      else if (t.value("top_user", false) && objective.item >= 0)
        objective.user = top_user(pretrained, ctx, objective.item);
    }
    if (o.contains("group")) objective.group = resolve_group(o.at("group"), ctx, p.dataset->side, pretrained);
    if (o.contains("other_group"))
      objective.other = resolve_group(o.at("other_group"), ctx, p.dataset->side, pretrained);
  } catch (const nlohmann::json::exception& e) {
    throw Error("config", std::string("bad objective block: ") + e.what());
  }
  if ((objective.intent == Intent::kPointScore && (objective.user < 0 || objective.item < 0)) ||
      (objective.intent == Intent::kItemMean && objective.item < 0))
    throw Error("config", "objective target is incomplete");
  run.result = run_attack_from(pretrained, p.train, ctx, objective, p.gen_init, job.spec.attack);
  return run;
}

}  // namespace advrec
