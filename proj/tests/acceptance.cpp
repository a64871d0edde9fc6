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

// Acceptance runner: one PASS/FAIL line per criterion.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "advrec/attacker.hpp"
#include "advrec/distmetrics.hpp"
#include "advrec/generator.hpp"
#include "advrec/harness.hpp"
#include "oracles.hpp"

namespace {

using namespace advrec;
using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

class Runner {
 public:
  Runner(std::filesystem::path out, std::set<int> only, std::string generator)
      : out_(std::move(out)), only_(std::move(only)), generator_path_(std::move(generator)) {}

  int run() {
    check(1, "alt-min correctness", [&] { return alt_min(); });
    check(2, "zeroth-order oracle", [&] { return zeroth_order(); });
    check(3, "distribution metrics", [&] { return metrics(); });
    check(4, "generator indistinguishability", [&] { return generator(); });
    check(5, "single user-item attack", [&] { return single_ui(); });
    check(6, "top-item removal", [&] { return removal(); });
    check(7, "top-user attack structure", [&] { return top_user_structure(); });
    check(8, "fairness gap", [&] { return fairness(); });
    check(9, "group-attack reporting", [&] { return group_reporting(); });
    check(10, "determinism", [&] { return determinism(); });
    std::printf("SUMMARY %d passed, %d failed\n", passed_, failed_);
    return failed_ == 0 ? 0 : 1;
  }

 private:
  void check(int id, const char* name, const std::function<Verdict()>& body) {
    if (!only_.empty() && !only_.count(id)) return;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = body();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    (v.pass ? passed_ : failed_)++;
    std::printf("C%d %s %s: %s [%.1fs]\n", id, v.pass ? "PASS" : "FAIL", name, v.detail.c_str(),
                since(t0));
    std::fflush(stdout);
  }

  const Dataset& data() {
    if (!dataset_) {
      dataset_ = ingest(DatasetFormat::kMl100k,
                        std::filesystem::path(ADVREC_DATA_DIR) / "ml-100k");
    }
    return *dataset_;
  }

  const GeneratorModel& gan() {
    if (!gan_) {
      if (!generator_path_.empty()) {
        gan_ = load_generator(generator_path_);
      } else {
        const auto t0 = Clock::now();
        gan_ = train_gan(data().ratings, preset(Family::kSingleUi).generator.gan);
        gan_seconds_ = since(t0);
      }
    }
    return *gan_;
  }

  SharedInputs shared(Family family) {
    const ExperimentSpec spec = preset(family);
    SharedInputs s;
    s.dataset = data();
    s.gen_init = to_rating_scale(gan_sample(gan(), spec.generator.k, spec.generator.sample_seed));
    return s;
  }

  ExperimentResult experiment(const ExperimentSpec& spec, const std::string& name) {
    ExperimentResult r = run_experiment(spec, shared(spec.family));
    report(r, out_ / name);
    return r;
  }

  Verdict alt_min() {
    const auto t0 = Clock::now();
    Rng rng(1);
    double worst_increase = -INFINITY, worst_row = 0.0;
    for (int inst = 0; inst < 50; ++inst) {
      const oracle::DenseProblem p = oracle::random_problem(20, 30, 0.3, rng);
      const auto c = oracle::check_alt_min(p, 4, 0.1, 10, 1000 + inst);
      worst_increase = std::max(worst_increase, c.worst_increase);
      worst_row = std::max(worst_row, c.worst_row_error);
    }
    const double secs = since(t0);
    return {worst_increase <= 1e-9 && worst_row <= 1e-8 && secs < 5.0,
            "max half-sweep increase " + fmt("%.3g", worst_increase) + " (<=1e-9), max row error " +
                fmt("%.3g", worst_row) + " (<=1e-8), " + fmt("%.2fs", secs) + " (<5s)"};
  }

  Verdict zeroth_order() {
    const auto t0 = Clock::now();
    Rng rng(2);
    auto random = [&](int r, int c) {
      RowMatrix m(r, c);
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = 5.0 * rng.uniform();
      return m;
    };
    double linear_err = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const RowMatrix c = random(8, 12).array() - 2.5;
      const RowMatrix z = random(8, 12);
      const RowMatrix expected = oracle::project(c, svd_directions(z, 5));
      for (double alpha : {1e-4, 1e-2, 1.0}) {
        const ZoEstimate est = zo_gradient(
            [&](const RowMatrix& x) { return c.cwiseProduct(x).sum(); }, z, alpha, 5);
        linear_err = std::max(linear_err, (est.grad - expected).cwiseAbs().maxCoeff());
      }
    }
    double worst_ratio_dev = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const RowMatrix z = random(6, 9);
      const RowMatrix projected = oracle::project(2.0 * z, svd_directions(z, 4));
      auto err = [&](double alpha) {
        return (zo_gradient([](const RowMatrix& x) { return x.squaredNorm(); }, z, alpha, 4).grad -
                projected)
            .norm();
      };
      for (double alpha : {1.0, 0.1, 0.01})
        worst_ratio_dev = std::max(worst_ratio_dev, std::abs(err(alpha / 2) / err(alpha) / 0.5 - 1));
    }
    const double secs = since(t0);
    return {linear_err <= 1e-6 && worst_ratio_dev <= 0.2 && secs < 5.0,
            "linear max error " + fmt("%.3g", linear_err) + " (<=1e-6), quadratic halving ratio off by " +
                fmt("%.3g", 100 * worst_ratio_dev) + "% (<=20%), " + fmt("%.2fs", secs) + " (<5s)"};
  }

  Verdict metrics() {
    const ItemMarginal p = {0.3, 0.1, 0.1, 0.2, 0.2, 0.1};
    const ItemMarginal a = {1, 0, 0, 0, 0, 0}, b = {0, 0, 0, 0, 0, 1};
    const bool same = tvd(p, p) == 0.0 && js(p, p) == 0.0;
    const bool disjoint = tvd(a, b) == 1.0 && std::abs(js(a, b) - std::log(2.0)) <= 1e-12;
    RowMatrix e1 = RowMatrix::Zero(1, 7);
    e1(0, 3) = 5.0;
    const EigenSummary s1 = eigensummary(e1);
    bool exact = s1.top_eigs[0] == 25.0;
    for (int i = 1; i < kTopEigs; ++i) exact = exact && s1.top_eigs[i] == 0.0;
    RowMatrix r1(3, 4);
    r1 << 1, 2, 0, 2, 2, 4, 0, 4, 3, 6, 0, 6;  // rows c_i * [1 2 0 2], |c|^2 = 14, |v|^2 = 9
    const EigenSummary s2 = eigensummary(r1);
    const double rel = std::abs(s2.top_eigs[0] - 126.0) / 126.0;
    double tail = 0.0;
    for (int i = 1; i < kTopEigs; ++i) tail = std::max(tail, s2.top_eigs[i]);
    const bool rank1 = rel <= 1e-12 && tail <= 1e-10;
    return {same && disjoint && exact && rank1,
            std::string("identical ") + (same ? "0/0" : "nonzero") + ", disjoint TVD " +
                fmt("%.17g", tvd(a, b)) + " JS-ln2 " + fmt("%.3g", js(a, b) - std::log(2.0)) +
                ", single-profile top eig " + fmt("%.17g", s1.top_eigs[0]) +
                " (25), rank-1 set rel err " + fmt("%.3g", rel)};
  }

  Verdict generator() {
    const bool trained_here = !gan_;
    const auto t0 = Clock::now();
    const GeneratorModel& g = gan();
    const RatingMatrix& real = data().ratings;
    const FakeProfileMatrix fake = to_rating_scale(gan_sample(g, real.n_users(), 20260101));
    const MeanDistance md = mean_distance(real, fake);
    const double eig = max_relative_deviation(eigensummary(dense_ratings(real)),
                                              eigensummary(round_ratings(fake.values())));
    const double secs = trained_here ? since(t0) : gan_seconds_ + since(t0);
    const bool timed = generator_path_.empty();
    return {md.mean_js <= 0.1 && md.mean_tvd <= 0.1 && eig <= 0.25 && (!timed || secs < 900),
            "mean JS " + fmt("%.4f", md.mean_js) + " (<=0.1), mean TVD " + fmt("%.4f", md.mean_tvd) +
                " (<=0.1), max top-10 eigen deviation " + fmt("%.3f", eig) +
                " (<=0.25) at n=" + std::to_string(real.n_users()) + ", kept epoch " +
                std::to_string(g.selected_epoch) + ", " +
                (timed ? fmt("%.0fs", secs) + " (<900s)" : std::string("checkpoint supplied"))};
  }

  Verdict single_ui() {
    const auto t0 = Clock::now();
    const ExperimentResult r = experiment(preset(Family::kSingleUi), "single_ui");
    const double secs = since(t0);
    int ok = 0, positive = 0;
    double worst_js = 0.0, slowest = 0.0;
    for (std::size_t i = 0; i < r.summary.outcomes.size(); ++i) {
      const TargetOutcome& o = r.summary.outcomes[i];
      if (o.success) {
        ++ok;
        worst_js = std::max(worst_js, o.final_mean_js);
      }
      positive += o.delta > 0.0;
      if (!r.traces[i].rows.empty()) slowest = std::max(slowest, r.traces[i].rows.back().seconds);
    }
    const int n = r.summary.sample_count;
    const double rate = n ? static_cast<double>(ok) / n : 0.0;
    return {n == 20 && rate >= 0.8 && worst_js <= 0.1 && secs < 7200 && slowest < 360,
            std::to_string(ok) + "/" + std::to_string(n) + " reached delta>=1 (rate " +
                fmt("%.2f", rate) + ", need >=0.8); " + std::to_string(positive) +
                " had delta>0; worst final JS on successes " + fmt("%.4f", worst_js) +
                "; slowest target " + fmt("%.0fs", slowest)};
  }

  Verdict removal() {
    const auto t0 = Clock::now();
    const ExperimentResult r = experiment(preset(Family::kTopItemRemoval), "top_item_removal");
    const double secs = since(t0);
    return {r.summary.sample_count == 10 && r.summary.successes >= 8 && secs < 3600,
            std::to_string(r.summary.successes) + "/" + std::to_string(r.summary.sample_count) +
                " top-1 items left the top-10 (need >=8), " + fmt("%.0fs", secs)};
  }

  Verdict top_user_structure() {
    const ExperimentResult r = experiment(preset(Family::kTopUser), "top_user");
    bool all = r.summary.sample_count == 3;
    std::ostringstream detail;
    for (const TargetOutcome& o : r.summary.outcomes) {
      if (!o.impact) {
        all = false;
        detail << o.label << ": no impact report; ";
        continue;
      }
      const ImpactReport& m = *o.impact;
      const bool users = m.top_users_delta > m.mean_delta_users && m.mean_delta_users > 0.0 &&
                         0.0 > m.bottom_users_delta;
      const bool items = m.top_items_delta > m.mean_delta_items && m.mean_delta_items > 0.0 &&
                         0.0 > m.bottom_items_delta;
      all = all && users && items;
      detail << o.label << " users " << fmt("%.3f", m.top_users_delta) << ">"
             << fmt("%.3f", m.mean_delta_users) << ">0>" << fmt("%.3f", m.bottom_users_delta)
             << (users ? " ok" : " no") << ", items " << fmt("%.3f", m.top_items_delta) << ">"
             << fmt("%.3f", m.mean_delta_items) << ">0>" << fmt("%.3f", m.bottom_items_delta)
             << (items ? " ok" : " no") << "; ";
    }
    return {all, detail.str()};
  }

  Verdict fairness() {
    const auto t0 = Clock::now();
    const ExperimentResult r = experiment(preset(Family::kFairness), "fairness");
    const double secs = since(t0);
    if (r.summary.outcomes.empty() || r.traces[0].rows.empty())
      return {false, "no trace"};
    const TargetOutcome& o = r.summary.outcomes[0];
    const double before = o.f_before;
    const double after = r.traces[0].rows.back().f_A;
    return {after <= 0.5 * before && secs < 3600,
            "target MAE gap " + fmt("%.5f", before) + " -> " + fmt("%.5f", after) +
                " at the last iteration (best " + fmt("%.5f", o.f_best) + " at t=" +
                std::to_string(o.best_t) + "), need <= 50% of before, " + fmt("%.0fs", secs)};
  }

  Verdict group_reporting() {
    bool all = true;
    std::ostringstream detail;
    for (Family f : {Family::kGroupScore, Family::kGroupError, Family::kHitRateImprove,
                     Family::kErrorImprove}) {
      const std::string name = to_string(f);
      const ExperimentResult r = experiment(preset(f), name);
      std::ifstream in(out_ / name / "groups.csv");
      std::string line;
      std::getline(in, line);
      const bool header = line ==
                          "group_index,group_label,before_metric,test_before_metric,"
                          "percent_target_improved,percent_test_improved,best_t";
      int rows = 0, populated = 0;
      while (std::getline(in, line)) {
        ++rows;
        std::vector<std::string> cells;
        std::string cell;
        std::stringstream ss(line);
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() == 7 && !cells[2].empty() && !cells[3].empty() && !cells[4].empty() &&
            !cells[5].empty())
          ++populated;
      }
      double best = -INFINITY;
      for (const TargetOutcome& o : r.summary.outcomes)
        if (o.percent_target) best = std::max(best, *o.percent_target);
      const bool ok = header && rows == 10 && populated == 10 && best > 0.0;
      all = all && ok;
      detail << name << ": " << populated << "/" << rows << " deciles populated, best % target "
             << fmt("%.2f", best) << (ok ? " ok" : " no") << "; ";
    }
    return {all, detail.str()};
  }

  Verdict determinism() {
    ExperimentSpec spec = preset(Family::kSingleUi);
    spec.sample_count = 2;
    const std::string a = summary_json(run_experiment(spec, shared(spec.family)).summary).dump();
    const std::string b = summary_json(run_experiment(spec, shared(spec.family)).summary).dump();
    ExperimentSpec g = preset(Family::kErrorImprove);
    g.group_indices = {0};
    g.attack.T = 3;
    const std::string c = summary_json(run_experiment(g, shared(g.family)).summary).dump();
    const std::string d = summary_json(run_experiment(g, shared(g.family)).summary).dump();
    GanConfig small = preset(Family::kSingleUi).generator.gan;
    small.epochs = 2;
    small.select_every = 1;
    const GeneratorModel g1 = train_gan(data().ratings, small);
    const GeneratorModel g2 = train_gan(data().ratings, small);
    const bool gan_same = g1.sampler.flatten() == g2.sampler.flatten();
    return {a == b && c == d && gan_same,
            std::string("single_ui summary ") + (a == b ? "identical" : "differs") +
                ", group summary " + (c == d ? "identical" : "differs") + ", GAN weights " +
                (gan_same ? "identical" : "differ")};
  }

  std::filesystem::path out_;
  std::set<int> only_;
  std::string generator_path_;
  std::optional<Dataset> dataset_;
  std::optional<GeneratorModel> gan_;
  double gan_seconds_ = 0.0;
  int passed_ = 0;
  int failed_ = 0;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria runner"};
  std::string out = "acceptance_out";
  std::vector<int> only;
  std::string generator;
  app.add_option("--out", out, "Directory for experiment reports");
  app.add_option("--only", only, "Criterion numbers to run (default: all)")->delimiter(',');
  app.add_option("--generator", generator, "Use this generator checkpoint instead of training");
  CLI11_PARSE(app, argc, argv);
  Runner runner(out, std::set<int>(only.begin(), only.end()), generator);
  return runner.run();
}
