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

#include <bitset>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace advrec {

inline constexpr int kMinRating = 1;
inline constexpr int kMaxRating = 5;
inline constexpr int kNumGenres = 19;

struct Rating {
  int user = 0;
  int item = 0;
  int value = 0;

  friend bool operator==(const Rating&, const Rating&) = default;
};

// Sparse explicit ratings of the real users. Unrated cells are absent, never
// stored as zero.
class RatingMatrix {
 public:
  RatingMatrix() = default;

  // Validates: indices in range, ratings in [1,5], no duplicate cells.
  // Entries are kept sorted by (user, item).
  RatingMatrix(int n_users, int n_items, std::vector<Rating> entries,
               std::vector<std::int64_t> user_ids = {},
               std::vector<std::int64_t> item_ids = {});

  int n_users() const { return n_users_; }
  int n_items() const { return n_items_; }
  const std::vector<Rating>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  // External ids; default to 1-based positions when not supplied.
  const std::vector<std::int64_t>& user_ids() const { return user_ids_; }
  const std::vector<std::int64_t>& item_ids() const { return item_ids_; }

  std::vector<int> user_counts() const;
  std::vector<int> item_counts() const;

  friend bool operator==(const RatingMatrix&, const RatingMatrix&) = default;

 private:
  int n_users_ = 0;
  int n_items_ = 0;
  std::vector<Rating> entries_;
  std::vector<std::int64_t> user_ids_;
  std::vector<std::int64_t> item_ids_;
};

enum class Gender { kMale, kFemale };

struct SideInfo {
  std::optional<std::vector<std::bitset<kNumGenres>>> item_genres;
  std::optional<std::vector<int>> user_age;
  std::optional<std::vector<Gender>> user_gender;
};

extern const char* const kGenreNames[kNumGenres];

enum class DatasetFormat { kMl100k, kMl1m };
enum class SplitMode { kE1, kE2a, kE2b };

std::string to_string(SplitMode mode);
SplitMode parse_split_mode(const std::string& s);
DatasetFormat parse_dataset_format(const std::string& s);

struct DatasetSplit {
  SplitMode mode = SplitMode::kE1;
  std::vector<Rating> train;
  std::vector<Rating> target;
  std::vector<Rating> test;
};

struct Dataset {
  RatingMatrix ratings;
  SideInfo side;
};

Dataset ingest(DatasetFormat format, const std::filesystem::path& dir);

// E1: everything in train. E2a: one target and one test tuple per user with at
// least 3 ratings. E2b: floor(0.8c) train, floor(0.1c) target, rest test.
DatasetSplit split(const RatingMatrix& data, SplitMode mode, std::uint64_t seed);

// Affine map [0,5] -> [-1,1] and back.
double to_symmetric_scale(double rating);
double from_symmetric_scale(double value);

struct SynthOptions {
  int n_users = 0;
  int n_items = 0;
  int rank = 1;
  double density = 1.0;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
};

RatingMatrix synth(const SynthOptions& opts);

// Internal CSV form: header `user_id,item_id,rating`, external ids.
void write_ratings_csv(const RatingMatrix& data, const std::filesystem::path& path);
RatingMatrix read_ratings_csv(const std::filesystem::path& path);

}  // namespace advrec
