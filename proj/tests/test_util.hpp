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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>

#include "advrec/dataset.hpp"
#include "advrec/recommender.hpp"
#include "advrec/rng.hpp"

namespace advrec::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("advrec_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// Random sparse ratings, every user and item with at least one entry.
inline RatingMatrix random_ratings(int n_users, int n_items, double density, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Rating> entries;
  for (int u = 0; u < n_users; ++u) {
    for (int j = 0; j < n_items; ++j) {
      const bool diag = j == u % n_items || u == j % n_users;
      if (diag || rng.uniform() < density)
        entries.push_back({u, j, 1 + static_cast<int>(rng.uniform_index(5))});
    }
  }
  return RatingMatrix(n_users, n_items, std::move(entries));
}

inline std::string data_dir() { return ADVREC_DATA_DIR; }

inline bool have_ml100k() {
  return std::filesystem::exists(std::filesystem::path(data_dir()) / "ml-100k" / "u.data");
}

}  // namespace advrec::testing
