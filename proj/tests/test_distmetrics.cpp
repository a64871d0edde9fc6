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

#include <Eigen/Eigenvalues>
#include <cmath>

#include "advrec/distmetrics.hpp"
#include "advrec/error.hpp"
#include "test_util.hpp"

namespace advrec {
namespace {

const ItemMarginal kUnratedOnly = {1, 0, 0, 0, 0, 0};
const ItemMarginal kOneOnly = {0, 1, 0, 0, 0, 0};

TEST(Marginals, CountsRatingsAndUnrated) {
  const RatingMatrix data(4, 2, {{0, 0, 5}, {1, 0, 5}, {2, 1, 3}});
  const auto m = marginals(data);
  EXPECT_EQ(m[0], (ItemMarginal{0.5, 0, 0, 0, 0, 0.5}));
  EXPECT_EQ(m[1], (ItemMarginal{0.75, 0, 0, 0.25, 0, 0}));
  const auto dense = marginals(dense_ratings(data));
  EXPECT_EQ(dense, m);
}

TEST(Marginals, AllUnratedAndEmpty) {
  const auto m = marginals(RowMatrix(RowMatrix::Zero(3, 2)));
  EXPECT_EQ(m[0], kUnratedOnly);
  EXPECT_EQ(marginals(RowMatrix(0, 2))[1], kUnratedOnly);
}

TEST(Marginals, RoundsContinuousValues) {
  RowMatrix z(2, 1);
  z << 4.4, 0.3;
  const auto m = marginals(z);
  EXPECT_EQ(m[0], (ItemMarginal{0.5, 0, 0, 0, 0.5, 0}));
}

TEST(Tvd, Examples) {
  EXPECT_EQ(tvd(kOneOnly, kOneOnly), 0.0);
  EXPECT_EQ(tvd(kUnratedOnly, kOneOnly), 1.0);
  EXPECT_DOUBLE_EQ(tvd({0.5, 0.5, 0, 0, 0, 0}, {0.25, 0.75, 0, 0, 0, 0}), 0.25);
}

TEST(Js, Examples) {
  const ItemMarginal p = {0.1, 0.2, 0.3, 0.1, 0.2, 0.1};
  EXPECT_EQ(js(p, p), 0.0);
  EXPECT_NEAR(js(kUnratedOnly, kOneOnly), std::log(2.0), 1e-12);
}

TEST(Js, BruteForceAgreementAndBounds) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    ItemMarginal p{}, q{};
    double sp = 0, sq = 0;
    for (int b = 0; b < 6; ++b) {
      p[b] = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
      q[b] = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
      sp += p[b];
      sq += q[b];
    }
    if (sp == 0 || sq == 0) continue;
    double kl_p = 0, kl_q = 0;
    for (int b = 0; b < 6; ++b) {
      p[b] /= sp;
      q[b] /= sq;
    }
    for (int b = 0; b < 6; ++b) {
      const double m = (p[b] + q[b]) / 2;
      if (p[b] > 0) kl_p += p[b] * (std::log(p[b]) - std::log(m));
      if (q[b] > 0) kl_q += q[b] * (std::log(q[b]) - std::log(m));
    }
    const double value = js(p, q);
    EXPECT_NEAR(value, 0.5 * (kl_p + kl_q), 1e-12);
    EXPECT_NEAR(value, js(q, p), 1e-15);
    EXPECT_GE(value, 0.0);
    EXPECT_LE(value, std::log(2.0) + 1e-12);
    EXPECT_LE(tvd(p, q), 1.0 + 1e-12);
    EXPECT_EQ(tvd(p, q), tvd(q, p));
  }
}

TEST(MeanDistance, CopyIsZeroAllFivesIsFar) {
  const RatingMatrix data = testing::random_ratings(30, 20, 0.3, 4);
  const FakeProfileMatrix copy(dense_ratings(data), Scale::kRating);
  const MeanDistance d = mean_distance(data, copy);
  EXPECT_EQ(d.mean_tvd, 0.0);
  EXPECT_EQ(d.mean_js, 0.0);
  const FakeProfileMatrix fives(RowMatrix::Constant(8, 20, 5.0), Scale::kRating);
  EXPECT_GT(mean_distance(data, fives).mean_tvd, 0.5);
  const FakeProfileMatrix sym(RowMatrix::Zero(8, 20), Scale::kSymmetric);
  EXPECT_THROW(mean_distance(data, sym), Error);
  const FakeProfileMatrix narrow(RowMatrix::Zero(8, 19), Scale::kRating);
  EXPECT_THROW(mean_distance(data, narrow), Error);
}

TEST(MeanDistance, AllFivesOnMl100k) {
  if (!testing::have_ml100k()) GTEST_SKIP() << "MovieLens 100K not found";
  const Dataset ds = ingest(DatasetFormat::kMl100k, std::filesystem::path(testing::data_dir()) / "ml-100k");
  const FakeProfileMatrix fives(RowMatrix::Constant(64, ds.ratings.n_items(), 5.0), Scale::kRating);
  EXPECT_GT(mean_distance(ds.ratings, fives).mean_tvd, 0.5);
}

TEST(EigenSummary, AnalyticCases) {
  RowMatrix e1 = RowMatrix::Zero(1, 6);
  e1(0, 0) = 5.0;
  const EigenSummary s = eigensummary(e1);
  ASSERT_EQ(s.top_eigs.size(), static_cast<std::size_t>(kTopEigs));
  EXPECT_EQ(s.top_eigs[0], 25.0);
  for (int i = 1; i < kTopEigs; ++i) EXPECT_EQ(s.top_eigs[i], 0.0);

  RowMatrix orth = RowMatrix::Zero(2, 3);
  orth(0, 1) = 3.0;
  orth(1, 2) = 4.0;
  const EigenSummary o = eigensummary(orth);
  EXPECT_NEAR(o.top_eigs[0], 16.0, 1e-12);
  EXPECT_NEAR(o.top_eigs[1], 9.0, 1e-12);
  EXPECT_EQ(o.top_eigs[2], 0.0);
}

TEST(EigenSummary, RankOneSetAndGramOracle) {
  // rows c_i * v: the only nonzero eigenvalue is |c|^2 |v|^2.
  RowMatrix x(4, 5);
  const Eigen::RowVectorXd v = (Eigen::RowVectorXd(5) << 1, 2, 0, 3, 1).finished();
  const double c[4] = {1, 2, 3, 1};
  for (int i = 0; i < 4; ++i) x.row(i) = c[i] * v;
  const EigenSummary s = eigensummary(x);
  EXPECT_NEAR(s.top_eigs[0], 15.0 * 15.0, 1e-12 * 225.0);
  for (int i = 1; i < kTopEigs; ++i) EXPECT_NEAR(s.top_eigs[i], 0.0, 1e-10);

  const RatingMatrix data = testing::random_ratings(40, 25, 0.4, 8);
  const RowMatrix dense = dense_ratings(data);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(dense.transpose() * dense));
  const Eigen::VectorXd eig = es.eigenvalues().reverse();
  const EigenSummary g = eigensummary(dense);
  for (int i = 0; i < kTopEigs; ++i) EXPECT_NEAR(g.top_eigs[i], eig[i], 1e-8 * eig[0]);
  EXPECT_EQ(max_relative_deviation(g, eigensummary(dense)), 0.0);
}

TEST(EigenSummary, RelativeDeviation) {
  EigenSummary a{{4, 2, 0, 0, 0, 0, 0, 0, 0, 0}};
  EigenSummary b{{5, 1, 7, 0, 0, 0, 0, 0, 0, 0}};
  EXPECT_DOUBLE_EQ(max_relative_deviation(a, b), 0.5);
  EXPECT_THROW(max_relative_deviation(a, EigenSummary{{1}}), Error);
  EXPECT_THROW(eigensummary(RowMatrix(0, 3)), Error);
}

}  // namespace
}  // namespace advrec
