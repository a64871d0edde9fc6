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

// Command line front end: ingest data, train models, sample fake users, run
// attacks and experiment presets, and score fake profiles.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "advrec/attacker.hpp"
#include "advrec/dataset.hpp"
#include "advrec/distmetrics.hpp"
#include "advrec/error.hpp"
#include "advrec/generator.hpp"
#include "advrec/harness.hpp"
#include "advrec/profiles.hpp"
#include "advrec/recommender.hpp"

namespace {

using advrec::Error;
using nlohmann::json;

// A directory is ingested as MovieLens; a file is read as ratings CSV.
advrec::Dataset load_real(const std::string& path, const std::string& format) {
  if (std::filesystem::is_directory(path))
    return advrec::ingest(advrec::parse_dataset_format(format), path);
  advrec::Dataset ds;
  ds.ratings = advrec::read_ratings_csv(path);
  return ds;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing_file", "missing file " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error("parse", path + ": " + e.what());
  }
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-poisoning attacks on a low-rank recommender"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  bool seed_given = false;
  app.add_option_function<std::uint64_t>(
         "--seed", [&](std::uint64_t s) { seed = s, seed_given = true; },
         "Seed threaded through every module")
      ->configurable(false);

  std::string format = "ml100k";
  std::string data_dir = "data/ml-100k";
  std::string out;

  auto* ingest = app.add_subcommand("ingest", "Parse a MovieLens directory into ratings CSV");
  ingest->add_option("--format", format, "ml100k or ml1m");
  ingest->add_option("--dir", data_dir, "Dataset directory")->required();
  ingest->add_option("--out", out, "Output ratings CSV")->required();

  advrec::SynthOptions syn{100, 80, 5, 0.2, 0.5, 0};
  auto* synth = app.add_subcommand("synth", "Generate a synthetic low-rank rating set");
  synth->add_option("--users", syn.n_users);
  synth->add_option("--items", syn.n_items);
  synth->add_option("--rank", syn.rank);
  synth->add_option("--density", syn.density);
  synth->add_option("--noise", syn.noise_sd);
  synth->add_option("--out", out)->required();

  std::string real_path = "data/ml-100k";
  int d = 40, iters = 10;
  double lambda = 0.001;
  auto* train_rec = app.add_subcommand("train-recommender", "Fit the factor model on real ratings");
  train_rec->add_option("--real", real_path, "MovieLens directory or ratings CSV");
  train_rec->add_option("--format", format);
  train_rec->add_option("--d", d);
  train_rec->add_option("--lambda", lambda);
  train_rec->add_option("--iters", iters);
  train_rec->add_option("--out", out)->required();

  advrec::GanConfig gan;
  gan.epochs = 600;
  gan.select_every = 25;
  auto* train_gen = app.add_subcommand("train-generator", "Train the fake-profile generator");
  train_gen->add_option("--real", real_path, "MovieLens directory or ratings CSV");
  train_gen->add_option("--format", format);
  train_gen->add_option("--epochs", gan.epochs);
  train_gen->add_option("--hidden", gan.hidden);
  train_gen->add_option("--lr", gan.lr);
  train_gen->add_option("--select-every", gan.select_every, "0 keeps the last sampler");
  train_gen->add_option("--out", out)->required();

  std::string generator_path;
  bool empirical = false;
  int k = 64;
  auto* sample = app.add_subcommand("sample-fake", "Draw fake users in rating scale");
  sample->add_option("--generator", generator_path, "Generator checkpoint");
  sample->add_flag("--empirical", empirical, "Use the empirical-marginal sampler");
  sample->add_option("--real", real_path, "Real data for the empirical sampler");
  sample->add_option("--format", format);
  sample->add_option("--k", k);
  sample->add_option("--out", out)->required();

  std::string config_path;
  auto* attack = app.add_subcommand("attack", "Run one attack from a JSON config");
  attack->add_option("--config", config_path)->required();
  attack->add_option("--out", out)->required();

  std::string family, overrides_path, overrides_inline;
  int samples = -1;
  auto* experiment = app.add_subcommand("experiment", "Run an experiment preset");
  experiment->add_option("--preset", family, "single_ui, top_item_removal, item_mean, top_user, "
                                              "group_score, group_error, hit_rate_improve, "
                                              "error_improve, fairness")
      ->required();
  experiment->add_option("--data-dir", data_dir);
  experiment->add_option("--samples", samples);
  experiment->add_option("--generator", generator_path, "Generator checkpoint or fake CSV");
  experiment->add_option("--overrides", overrides_path, "JSON file of config overrides");
  experiment->add_option("--set", overrides_inline, "Inline JSON overrides");
  experiment->add_option("--out", out)->required();

  std::string fake_path;
  auto* metrics = app.add_subcommand("metrics", "Distribution distance of fake vs real profiles");
  metrics->add_option("--real", real_path, "MovieLens directory or ratings CSV")->required();
  metrics->add_option("--format", format);
  metrics->add_option("--fake", fake_path, "Fake profiles CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }

  try {
    if (*ingest) {
      const auto ds = advrec::ingest(advrec::parse_dataset_format(format), data_dir);
      advrec::write_ratings_csv(ds.ratings, out);
      print({{"users", ds.ratings.n_users()}, {"items", ds.ratings.n_items()},
             {"ratings", ds.ratings.size()}, {"out", out}});
    } else if (*synth) {
      syn.seed = seed;
      const auto data = advrec::synth(syn);
      advrec::write_ratings_csv(data, out);
      print({{"users", data.n_users()}, {"items", data.n_items()}, {"ratings", data.size()}});
    } else if (*train_rec) {
      const auto ds = load_real(real_path, format);
      const advrec::FactorModel model =
          advrec::pretrain(ds.ratings, 0, advrec::RecommenderConfig{d, lambda, seed}, iters);
      const auto set = advrec::make_train_set(ds.ratings.entries(), ds.ratings.n_users(),
                                              ds.ratings.n_items());
      advrec::save_model(model, out);
      print({{"objective", advrec::masked_objective(set, model)}, {"out", out}});
    } else if (*train_gen) {
      gan.seed = seed;
      const auto ds = load_real(real_path, format);
      const advrec::GeneratorModel model = advrec::train_gan(ds.ratings, gan);
      advrec::save_generator(model, out);
      print({{"epochs", model.epochs_done},
             {"selected_epoch", model.selected_epoch},
             {"selected_score", model.selected_score},
             {"out", out}});
    } else if (*sample) {
      advrec::FakeProfileMatrix z;
      if (empirical) {
        z = advrec::empirical_sample(load_real(real_path, format).ratings, k, seed);
      } else {
        if (generator_path.empty()) throw Error("config", "sample-fake needs --generator or --empirical");
        z = advrec::to_rating_scale(advrec::gan_sample(advrec::load_generator(generator_path), k, seed));
      }
      advrec::write_fake_csv(z, out);
      print({{"k", z.k()}, {"items", z.n_items()}, {"out", out}});
    } else if (*attack) {
      advrec::AttackJob job = advrec::parse_attack_config(read_json(config_path));
      if (seed_given) {
        job.spec.seed = seed;
        job.spec.rec.seed = seed;
        job.spec.attack.seed = seed;
        job.spec.generator.gan.seed = seed;
        job.spec.generator.sample_seed = seed;
      }
      const advrec::AttackRun run = advrec::run_attack_job(job);
      std::filesystem::create_directories(out);
      advrec::write_trace_csv(run.result.trace, std::filesystem::path(out) / "trace.csv");
      advrec::write_fake_csv(advrec::FakeProfileMatrix(run.result.z_final_rounded, advrec::Scale::kRating),
                             std::filesystem::path(out) / "fake.csv");
      json summary = {{"f_before", run.result.trace.f_before},
                      {"stop_reason", run.result.trace.stop_reason},
                      {"rows", run.result.trace.rows.size()}};
      if (!run.result.trace.rows.empty()) {
        const auto& last = run.result.trace.rows.back();
        summary["f_A"] = last.f_A;
        summary["delta"] = last.delta;
        summary["mean_tvd"] = last.mean_tvd;
        summary["mean_js"] = last.mean_js;
      }
      std::ofstream(std::filesystem::path(out) / "summary.json") << summary.dump(2) << '\n';
      print(summary);
      if (run.result.trace.failed()) {
        std::cerr << json{{"error", "attack"}, {"message", run.result.trace.stop_reason}}.dump() << '\n';
        return 1;
      }
    } else if (*experiment) {
      advrec::ExperimentSpec spec = advrec::preset(advrec::parse_family(family));
      spec.data_dir = data_dir;
      if (!overrides_path.empty()) spec = advrec::parse_experiment_overrides(spec, read_json(overrides_path));
      if (!overrides_inline.empty()) {
        try {
          spec = advrec::parse_experiment_overrides(spec, json::parse(overrides_inline));
        } catch (const json::exception& e) {
          throw Error("parse", std::string("--set: ") + e.what());
        }
      }
      if (samples >= 0) spec.sample_count = samples;
      if (!generator_path.empty()) {
        spec.generator.mode = advrec::GeneratorSpec::Mode::kFile;
        spec.generator.path = generator_path;
      }
      if (seed_given) {
        spec.seed = seed;
        spec.rec.seed = seed;
        spec.attack.seed = seed;
        spec.generator.gan.seed = seed;
        spec.generator.sample_seed = seed;
      }
      const advrec::ExperimentResult result = advrec::run_experiment(spec);
      advrec::report(result, out);
      const auto& s = result.summary;
      print({{"family", family},
             {"samples", s.sample_count},
             {"successes", s.successes},
             {"success_rate", s.success_rate ? json(*s.success_rate) : json(nullptr)},
             {"out", out}});
    } else if (*metrics) {
      const auto ds = load_real(real_path, format);
      const advrec::FakeProfileMatrix fake = advrec::read_fake_csv(fake_path, ds.ratings.n_items());
      const advrec::MeanDistance md = advrec::mean_distance(ds.ratings, fake);
      const auto real_eig = advrec::eigensummary(advrec::dense_ratings(ds.ratings));
      const auto fake_eig = advrec::eigensummary(advrec::round_ratings(fake.values()));
      print({{"mean_tvd", md.mean_tvd},
             {"mean_js", md.mean_js},
             {"js_log_base", "e"},
             {"real_top_eigs", real_eig.top_eigs},
             {"fake_top_eigs", fake_eig.top_eigs},
             {"max_relative_eig_deviation", advrec::max_relative_deviation(real_eig, fake_eig)}});
    }
  } catch (const Error& e) {
    std::cerr << json{{"error", e.code()}, {"message", e.what()}}.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
  return 0;
}
