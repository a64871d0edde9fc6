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

#include <functional>
#include <map>
#include <set>

#include "advrec/dataset.hpp"
#include "advrec/error.hpp"
#include "test_util.hpp"

namespace advrec {
namespace {

using testing::TempDir;
using testing::write_file;

std::string genre_flags(int set_bit) {
  std::string s;
  for (int g = 0; g < kNumGenres; ++g) s += std::string("|") + (g == set_bit ? "1" : "0");
  return s;
}

void write_ml100k(const TempDir& dir) {
  write_file(dir / "u.data",
             "10\t7\t5\t881250949\n"
             "10\t3\t3\t881250950\n"
             "4\t7\t1\t881250951\n"
             "4\t9\t2\t881250952\n");
  write_file(dir / "u.item",
             "3|Three (1995)|01-Jan-1995||http://x" + genre_flags(1) + "\n" +
             "7|Seven (1995)|01-Jan-1995||http://x" + genre_flags(7) + "\n" +
             "9|Nine (1995)|01-Jan-1995||http://x" + genre_flags(18) + "\n");
  write_file(dir / "u.user", "4|24|M|technician|85711\n10|53|F|other|94043\n");
}

std::string error_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

TEST(Ingest, Ml100kFixtureMapsIdsToSortedIndices) {
  TempDir dir;
  write_ml100k(dir);
  const Dataset ds = ingest(DatasetFormat::kMl100k, dir.path());
  EXPECT_EQ(ds.ratings.n_users(), 2);
  EXPECT_EQ(ds.ratings.n_items(), 3);
  EXPECT_EQ(ds.ratings.user_ids(), (std::vector<std::int64_t>{4, 10}));
  EXPECT_EQ(ds.ratings.item_ids(), (std::vector<std::int64_t>{3, 7, 9}));
  const std::vector<Rating> expected = {{0, 1, 1}, {0, 2, 2}, {1, 0, 3}, {1, 1, 5}};
  EXPECT_EQ(ds.ratings.entries(), expected);
  ASSERT_TRUE(ds.side.item_genres);
  EXPECT_TRUE((*ds.side.item_genres)[0].test(1));
  EXPECT_TRUE((*ds.side.item_genres)[2].test(18));
  EXPECT_EQ((*ds.side.item_genres)[1].count(), 1u);
  ASSERT_TRUE(ds.side.user_age && ds.side.user_gender);
  EXPECT_EQ(*ds.side.user_age, (std::vector<int>{24, 53}));
  EXPECT_EQ((*ds.side.user_gender)[1], Gender::kFemale);
}

TEST(Ingest, Ml1mFixture) {
  TempDir dir;
  write_file(dir / "ratings.dat", "1::20::4::978300760\n2::10::5::978300761\n2::20::1::1\n");
  write_file(dir / "movies.dat", "10::Ten (2000)::Action|Comedy\n20::Twenty (2001)::Drama\n");
  write_file(dir / "users.dat", "1::F::1::10::48067\n2::M::56::16::70072\n");
  const Dataset ds = ingest(DatasetFormat::kMl1m, dir.path());
  EXPECT_EQ(ds.ratings.n_users(), 2);
  EXPECT_EQ(ds.ratings.n_items(), 2);
  EXPECT_EQ(ds.ratings.size(), 3u);
  EXPECT_EQ((*ds.side.item_genres)[0].count(), 2u);
  EXPECT_EQ((*ds.side.user_age)[1], 56);
  EXPECT_EQ((*ds.side.user_gender)[0], Gender::kFemale);
}

TEST(Ingest, EmptyRatingsFileIsAnError) {
  TempDir dir;
  write_file(dir / "u.data", "");
  try {
    ingest(DatasetFormat::kMl100k, dir.path());
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "empty");
    EXPECT_NE(std::string(e.what()).find("no entries"), std::string::npos);
  }
}

TEST(Ingest, ErrorsNameFileAndLine) {
  TempDir dir;
  write_file(dir / "u.data", "1\t1\t5\t0\n1\tx\t3\t0\n");
  try {
    ingest(DatasetFormat::kMl100k, dir.path());
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "parse");
    EXPECT_NE(std::string(e.what()).find("u.data:2"), std::string::npos) << e.what();
  }
  write_file(dir / "u.data", "1\t1\t6\t0\n");
  EXPECT_EQ(error_code([&] { ingest(DatasetFormat::kMl100k, dir.path()); }), "range");
  write_file(dir / "u.data", "1\t1\t4\t0\n1\t1\t3\t0\n");
  EXPECT_EQ(error_code([&] { ingest(DatasetFormat::kMl100k, dir.path()); }), "duplicate");
  EXPECT_EQ(error_code([&] { ingest(DatasetFormat::kMl100k, dir / "nope"); }), "missing_file");
}

TEST(Ingest, RealMl100kShape) {
  if (!testing::have_ml100k()) GTEST_SKIP() << "MovieLens 100K not found";
  const Dataset ds = ingest(DatasetFormat::kMl100k, std::filesystem::path(testing::data_dir()) / "ml-100k");
  EXPECT_EQ(ds.ratings.n_users(), 943);
  EXPECT_EQ(ds.ratings.n_items(), 1682);
  EXPECT_EQ(ds.ratings.size(), 100000u);
}

TEST(RatingMatrix, RejectsInvalidEntries) {
  EXPECT_EQ(error_code([] { RatingMatrix(2, 2, {{0, 2, 3}}); }), "range");
  EXPECT_EQ(error_code([] { RatingMatrix(2, 2, {{0, 0, 0}}); }), "range");
  EXPECT_EQ(error_code([] { RatingMatrix(2, 2, {{0, 0, 1}, {0, 0, 2}}); }), "duplicate");
}

TEST(RatingsCsv, RoundTripIsIdentity) {
  TempDir dir;
  write_ml100k(dir);
  const Dataset ds = ingest(DatasetFormat::kMl100k, dir.path());
  write_ratings_csv(ds.ratings, dir / "r.csv");
  const RatingMatrix back = read_ratings_csv(dir / "r.csv");
  EXPECT_EQ(back, ds.ratings);
}

TEST(Split, E1KeepsEverythingInTrain) {
  const RatingMatrix data = testing::random_ratings(20, 15, 0.3, 1);
  const DatasetSplit s = split(data, SplitMode::kE1, 3);
  EXPECT_EQ(s.train, data.entries());
  EXPECT_TRUE(s.target.empty());
  EXPECT_TRUE(s.test.empty());
}

TEST(Split, E2bCountsPerUser) {
  std::vector<Rating> entries;
  for (int j = 0; j < 10; ++j) entries.push_back({0, j, 3});
  const RatingMatrix data(1, 10, entries);
  const DatasetSplit s = split(data, SplitMode::kE2b, 5);
  EXPECT_EQ(s.train.size(), 8u);
  EXPECT_EQ(s.target.size(), 1u);
  EXPECT_EQ(s.test.size(), 1u);
}

TEST(Split, E2aSmallUsersStayInTrain) {
  const RatingMatrix data(1, 4, {{0, 0, 3}, {0, 2, 4}});
  const DatasetSplit s = split(data, SplitMode::kE2a, 5);
  EXPECT_EQ(s.train.size(), 2u);
  EXPECT_TRUE(s.target.empty());
  EXPECT_TRUE(s.test.empty());
}

void expect_partition(const RatingMatrix& data, const DatasetSplit& s) {
  std::vector<Rating> all = s.train;
  all.insert(all.end(), s.target.begin(), s.target.end());
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end(), [](const Rating& a, const Rating& b) {
    return a.user != b.user ? a.user < b.user : a.item < b.item;
  });
  EXPECT_EQ(all, data.entries());
}

class SplitProperties : public ::testing::TestWithParam<int> {};

TEST_P(SplitProperties, PartitionDeterminismAndPerUserLimits) {
  const std::uint64_t seed = GetParam();
  const RatingMatrix data = testing::random_ratings(60, 40, 0.25, seed);
  for (SplitMode mode : {SplitMode::kE2a, SplitMode::kE2b}) {
    const DatasetSplit a = split(data, mode, seed);
    const DatasetSplit b = split(data, mode, seed);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.target, b.target);
    EXPECT_EQ(a.test, b.test);
    expect_partition(data, a);
    if (mode == SplitMode::kE2a) {
      std::map<int, int> tgt, tst;
      for (const auto& r : a.target) ++tgt[r.user];
      for (const auto& r : a.test) ++tst[r.user];
      for (const auto& [u, c] : tgt) EXPECT_EQ(c, 1);
      for (const auto& [u, c] : tst) EXPECT_EQ(c, 1);
    }
    const DatasetSplit other = split(data, mode, seed + 1000);
    EXPECT_NE(a.target, other.target);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, SplitProperties, ::testing::Values(1, 2, 3, 4, 5));

TEST(Split, E2bTrainFractionOverManyUsers) {
  SynthOptions o;
  o.n_users = 1000;
  o.n_items = 40;
  o.rank = 2;
  o.density = 0.5;
  o.seed = 11;
  const RatingMatrix data = synth(o);
  const DatasetSplit s = split(data, SplitMode::kE2b, 1);
  std::vector<int> total(data.n_users(), 0), train(data.n_users(), 0);
  for (const auto& r : data.entries()) ++total[r.user];
  for (const auto& r : s.train) ++train[r.user];
  double sum = 0.0;
  int users = 0;
  for (int u = 0; u < data.n_users(); ++u) {
    if (total[u] < 10) continue;
    sum += static_cast<double>(train[u]) / total[u];
    ++users;
  }
  ASSERT_GT(users, 900);
  const double mean = sum / users;
  EXPECT_GE(mean, 0.75);
  EXPECT_LE(mean, 0.85);
}

TEST(SymmetricScale, EndpointsMidpointAndRoundTrip) {
  EXPECT_DOUBLE_EQ(to_symmetric_scale(0.0), -1.0);
  EXPECT_DOUBLE_EQ(to_symmetric_scale(5.0), 1.0);
  EXPECT_DOUBLE_EQ(to_symmetric_scale(2.5), 0.0);
  EXPECT_DOUBLE_EQ(from_symmetric_scale(to_symmetric_scale(3.0)), 3.0);
  EXPECT_THROW(to_symmetric_scale(5.5), Error);
  EXPECT_THROW(from_symmetric_scale(-1.5), Error);
}

TEST(Synth, ExpectedDensityAndFullDensity) {
  SynthOptions o{40, 60, 3, 0.3, 0.1, 7};
  const RatingMatrix data = synth(o);
  // Binomial(2400, 0.3): sd ~ 22.4.
  EXPECT_NEAR(static_cast<double>(data.size()), 720.0, 4 * 22.5);
  o.density = 1.0;
  EXPECT_EQ(synth(o).size(), 2400u);
  EXPECT_EQ(synth(o), synth(o));
  for (const auto& r : synth(o).entries()) {
    EXPECT_GE(r.value, 1);
    EXPECT_LE(r.value, 5);
  }
}

TEST(Synth, RejectsBadOptions) {
  EXPECT_THROW(synth({0, 5, 1, 0.5, 0.0, 1}), Error);
  EXPECT_THROW(synth({5, 5, 6, 0.5, 0.0, 1}), Error);
  EXPECT_THROW(synth({5, 5, 1, 0.0, 0.0, 1}), Error);
  EXPECT_THROW(synth({5, 5, 1, 0.5, -1.0, 1}), Error);
}

}  // namespace
}  // namespace advrec
