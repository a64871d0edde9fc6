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

#include <gtest/gtest.h>

#include <numeric>

#include "advrec/error.hpp"
#include "advrec/recommender.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace advrec {
namespace {

FactorModel ones_model(int n, int m, int d, double lambda) {
  FactorModel model;
  model.U = RowMatrix::Ones(n, d);
  model.V = RowMatrix::Ones(m, d);
  model.lambda = lambda;
  return model;
}

TEST(AltMin, MatchesDenseSolveAndNeverIncreases) {
  Rng rng(2024);
  for (int inst = 0; inst < 50; ++inst) {
    const oracle::DenseProblem p = oracle::random_problem(20, 30, 0.3, rng);
    const auto check = oracle::check_alt_min(p, 4, 0.1, 5, 100 + inst);
    EXPECT_LE(check.worst_increase, 1e-9) << "instance " << inst;
    EXPECT_LE(check.worst_row_error, 1e-8) << "instance " << inst;
  }
}

TEST(AltMin, SingleCellHalfStep) {
  const TrainSet train(1, 1, {{0, 0, 2.0}});
  FactorModel model = ones_model(1, 1, 1, 0.001);
  update_users(train, model);
  EXPECT_NEAR(model.U(0, 0), 2.0 / 1.001, 1e-15);
}

TEST(AltMin, SingleCellConvergesToRating) {
  const TrainSet train(1, 1, {{0, 0, 2.0}});
  const FactorModel model = alt_min(train, ones_model(1, 1, 1, 0.001), 200);
  EXPECT_NEAR(predict(model, 0, 0), 2.0, 1e-3);
}

TEST(AltMin, EmptyRowGivesZeroVector) {
  const TrainSet train(2, 2, {{0, 0, 3.0}, {0, 1, 4.0}});
  FactorModel model = ones_model(2, 2, 2, 0.5);
  update_users(train, model);
  EXPECT_EQ(model.U.row(1).norm(), 0.0);
  EXPECT_GT(model.U.row(0).norm(), 0.0);
}

TEST(AltMin, ZeroLambdaRankDeficientIsAnError) {
  const TrainSet train(1, 1, {{0, 0, 3.0}});
  FactorModel model = ones_model(1, 1, 2, 0.0);
  try {
    update_users(train, model);
    FAIL() << "expected singular error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "singular");
    EXPECT_NE(std::string(e.what()).find("lambda > 0"), std::string::npos);
  }
  const TrainSet empty_row(2, 1, {{0, 0, 3.0}});
  FactorModel one = ones_model(2, 1, 1, 0.0);
  EXPECT_THROW(update_users(empty_row, one), Error);
}

TEST(AltMin, RecoversExactLowRankMatrix) {
  // Real-valued rank-3 truth. synth() adds a constant offset and rounds to
  // integers, so its output is not exactly rank 3.
  Rng rng(5);
  RowMatrix a(30, 3), b(25, 3);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = rng.normal();
  const RowMatrix truth = a * b.transpose();
  std::vector<TrainTuple> tuples;
  for (int u = 0; u < 30; ++u)
    for (int j = 0; j < 25; ++j) tuples.push_back({u, j, truth(u, j)});
  const TrainSet train(30, 25, tuples);
  const FactorModel model = alt_min(train, init_model(30, 25, 3, 1e-6, 1), 50);
  double sse = 0.0;
  for (const auto& t : tuples) sse += std::pow(predict(model, t.user, t.item) - t.rating, 2);
  EXPECT_LE(std::sqrt(sse / tuples.size()), 0.05);
}

TEST(AltMin, FitsSynthRatingsUpToRounding) {
  const RatingMatrix data = synth({30, 25, 3, 1.0, 0.0, 5});
  const TrainSet train = make_train_set(data.entries(), data.n_users(), data.n_items());
  const FactorModel model = alt_min(train, init_model(30, 25, 3, 1e-6, 1), 50);
  double sse = 0.0;
  for (const auto& r : data.entries()) sse += std::pow(predict(model, r.user, r.item) - r.value, 2);
  // Rounding to integers adds error of variance about 1/12.
  EXPECT_LE(std::sqrt(sse / data.size()), 0.6);
}

TEST(AltMin, RejectsBadIterationsAndShapes) {
  const TrainSet train(1, 1, {{0, 0, 2.0}});
  EXPECT_THROW(alt_min(train, ones_model(1, 1, 1, 0.1), 0), Error);
  EXPECT_THROW(alt_min(train, ones_model(2, 1, 1, 0.1), 1), Error);
  EXPECT_THROW(TrainSet(1, 1, {{0, 1, 2.0}}), Error);
}

TEST(Init, DeterministicAndValidated) {
  const FactorModel a = init_model(5, 4, 2, 0.1, 1);
  const FactorModel b = init_model(5, 4, 2, 0.1, 1);
  EXPECT_EQ(a.U, b.U);
  EXPECT_EQ(a.V, b.V);
  EXPECT_NE(a.U, init_model(5, 4, 2, 0.1, 2).U);
  EXPECT_EQ(a.U.rows(), 5);
  EXPECT_EQ(a.V.rows(), 4);
  EXPECT_THROW(init_model(5, 4, 0, 0.1, 1), Error);
  EXPECT_THROW(init_model(0, 4, 2, 0.1, 1), Error);
}

TEST(Init, EntriesHaveSmallSpread) {
  const FactorModel a = init_model(200, 200, 10, 0.1, 3);
  const double var = a.U.squaredNorm() / a.U.size();
  EXPECT_NEAR(std::sqrt(var), 0.1, 0.01);
}

TEST(Predict, DotProductAndRange) {
  FactorModel model;
  model.U = RowMatrix{{1, 2}, {0, 0}};
  model.V = RowMatrix{{3, 4}};
  EXPECT_DOUBLE_EQ(predict(model, 0, 0), 11.0);
  EXPECT_DOUBLE_EQ(predict(model, 1, 0), 0.0);
  EXPECT_THROW(predict(model, 2, 0), Error);
  EXPECT_THROW(predict(model, 0, 1), Error);
}

FactorModel scores_model(const std::vector<double>& scores) {
  FactorModel model;
  model.U = RowMatrix::Ones(1, 1);
  model.V = RowMatrix(static_cast<Eigen::Index>(scores.size()), 1);
  for (std::size_t j = 0; j < scores.size(); ++j) model.V(j, 0) = scores[j];
  return model;
}

TEST(TopK, OrdersByScoreThenIndex) {
  const FactorModel model = scores_model({1.0, 2.0, 0.5});
  const std::vector<int> all = {0, 1, 2};
  EXPECT_EQ(top_k(model, 0, all, 2), (std::vector<int>{1, 0}));
  EXPECT_EQ(top_k(model, 0, all, 10), (std::vector<int>{1, 0, 2}));
  EXPECT_TRUE(top_k(model, 0, std::vector<int>{}, 3).empty());
  const FactorModel flat = scores_model({1.0, 1.0, 1.0, 1.0});
  EXPECT_EQ(top_k(flat, 0, std::vector<int>{3, 1, 2, 0}, 4), (std::vector<int>{0, 1, 2, 3}));
}

TEST(TopK, InvariantToPositiveScaling) {
  Rng rng(9);
  std::vector<double> scores(40);
  for (auto& s : scores) s = rng.normal();
  std::vector<double> scaled = scores;
  for (auto& s : scaled) s *= 3.0;
  std::vector<int> all(40);
  std::iota(all.begin(), all.end(), 0);
  EXPECT_EQ(top_k(scores_model(scores), 0, all, 10), top_k(scores_model(scaled), 0, all, 10));
}

TEST(ModelIo, RoundTripIsExact) {
  testing::TempDir dir;
  const FactorModel model = init_model(7, 5, 3, 0.25, 4);
  save_model(model, dir / "m.txt");
  const FactorModel back = load_model(dir / "m.txt");
  EXPECT_EQ(back.U, model.U);
  EXPECT_EQ(back.V, model.V);
  EXPECT_EQ(back.lambda, model.lambda);
  EXPECT_THROW(load_model(dir / "missing.txt"), Error);
}

}  // namespace
}  // namespace advrec
