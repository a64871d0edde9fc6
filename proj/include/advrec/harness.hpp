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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "advrec/attacker.hpp"
#include "advrec/dataset.hpp"
#include "advrec/generator.hpp"
#include "advrec/objectives.hpp"

namespace advrec {

enum class Family {
  kSingleUi,
  kTopItemRemoval,
  kItemMean,
  kTopUser,
  kGroupScore,
  kGroupError,
  kHitRateImprove,
  kErrorImprove,
  kFairness,
};

std::string to_string(Family family);
Family parse_family(const std::string& s);

struct GeneratorSpec {
  enum class Mode { kGan, kEmpirical, kFile };
  Mode mode = Mode::kGan;
  int k = 64;
  GanConfig gan;
  std::uint64_t sample_seed = 1;
  std::filesystem::path path;  // kFile: a generator checkpoint or a fake-profile CSV
};

struct ExperimentSpec {
  Family family = Family::kSingleUi;
  DatasetFormat format = DatasetFormat::kMl100k;
  std::filesystem::path data_dir;
  SplitMode split = SplitMode::kE1;
  int sample_count = 20;
  RecommenderConfig rec;
  AttackConfig attack;
  GeneratorSpec generator;
  GroupKind group_kind = GroupKind::kScoreDecile;
  Axis group_axis = Axis::kItems;
  // Restrict group families to these group indices (empty = all groups).
  std::vector<int> group_indices;
  bool smooth_hit_rate = false;
  std::uint64_t seed = 0;

  void validate() const;
};

// Default settings of each experiment family.
ExperimentSpec preset(Family family);

struct TargetOutcome {
  std::string label;
  std::int64_t user_id = -1;  // external ids, -1 when not applicable
  std::int64_t item_id = -1;
  int group_index = -1;
  bool success = false;
  double f_before = 0.0;  // adversarial loss before the attack
  double f_best = 0.0;    // best logged f_A
  double f_final = 0.0;   // last logged f_A
  double delta = 0.0;     // f_before - f_best
  int best_t = 0;
  int iterations = 0;
  double before_metric = 0.0;  // raw objective value on the target set before the attack
  std::optional<double> percent_target;
  std::optional<double> test_before;
  std::optional<double> test_at_best;
  std::optional<double> percent_test;
  double final_mean_tvd = 0.0;
  double final_mean_js = 0.0;
  std::string stop_reason;
  std::string error;
  // top_user family
  std::optional<ImpactReport> impact;
};

struct RunSummary {
  Family family = Family::kSingleUi;
  int sample_count = 0;
  int successes = 0;
  std::optional<double> success_rate;
  double gen_mean_tvd = 0.0;  // of the initial fake profiles
  double gen_mean_js = 0.0;
  std::vector<TargetOutcome> outcomes;
  nlohmann::json config;
};

struct ExperimentResult {
  RunSummary summary;
  std::vector<AttackTrace> traces;            // one per outcome
  std::vector<std::vector<std::string>> extra_names;  // column names of each trace's extras
  std::vector<RowMatrix> final_z;             // rounded, one per outcome
};

// Inputs that are expensive to rebuild and may be shared across experiments.
struct SharedInputs {
  std::optional<Dataset> dataset;
  std::optional<FakeProfileMatrix> gen_init;
};

FakeProfileMatrix make_gen_init(const GeneratorSpec& spec, const RatingMatrix& data);

ExperimentResult run_experiment(const ExperimentSpec& spec, const SharedInputs& shared = {});

nlohmann::json summary_json(const RunSummary& summary);

// summary.json, traces/<i>.csv (+ traces/<i>_extras.csv), fake/<i>.csv,
// groups.csv for group families, groups_trace.csv for fairness, and
// impact/<i>_{users,items}.csv for top_user.
void report(const ExperimentResult& result, const std::filesystem::path& out_dir);

void write_trace_csv(const AttackTrace& trace, const std::filesystem::path& path);
std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

// Attack config file: {dataset, split, recommender, generator, objective, attacker}.
struct AttackJob {
  ExperimentSpec spec;  // family unused; data, split, rec, attack, generator
  nlohmann::json objective;
};
AttackJob parse_attack_config(const nlohmann::json& config);
ExperimentSpec parse_experiment_overrides(ExperimentSpec base, const nlohmann::json& overrides);

struct AttackRun {
  AttackResult result;
  AttackObjective objective;
  DatasetSplit split;
};
AttackRun run_attack_job(const AttackJob& job, const SharedInputs& shared = {});

}  // namespace advrec
