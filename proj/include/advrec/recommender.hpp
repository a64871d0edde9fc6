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

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "advrec/dataset.hpp"

namespace advrec {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Latent factors of the low-rank recommender. Rows 0..n-1 of U belong to real
// users, rows n..n'-1 to fake users.
struct FactorModel {
  RowMatrix U;
  RowMatrix V;
  double lambda = 0.0;

  int n_users() const { return static_cast<int>(U.rows()); }
  int n_items() const { return static_cast<int>(V.rows()); }
  int rank() const { return static_cast<int>(U.cols()); }
};

struct TrainTuple {
  int user = 0;
  int item = 0;
  double rating = 0.0;
};

// Training tuples over an n' x m grid, with row and column adjacency built
// once so each half-sweep is a pass over contiguous lists.
class TrainSet {
 public:
  TrainSet(int n_rows, int n_items, std::vector<TrainTuple> tuples);

  int n_rows() const { return n_rows_; }
  int n_items() const { return n_items_; }
  const std::vector<TrainTuple>& tuples() const { return tuples_; }

  struct Entry {
    int index;
    double rating;
  };
  std::span<const Entry> row(int u) const {
    return {row_entries_.data() + row_ptr_[u], row_entries_.data() + row_ptr_[u + 1]};
  }
  std::span<const Entry> column(int j) const {
    return {col_entries_.data() + col_ptr_[j], col_entries_.data() + col_ptr_[j + 1]};
  }

 private:
  int n_rows_;
  int n_items_;
  std::vector<TrainTuple> tuples_;
  std::vector<std::size_t> row_ptr_, col_ptr_;
  std::vector<Entry> row_entries_, col_entries_;
};

// Real ratings only, on a grid with `n_rows` >= n real users (the extra rows
// are the fake-user slots, left empty).
TrainSet make_train_set(std::span<const Rating> ratings, int n_rows, int n_items);

// I.i.d. N(0, 0.1^2) entries.
FactorModel init_model(int n_prime, int m, int d, double lambda, std::uint64_t seed);

// `iters` full sweeps, U rows first then V rows. Each row solves
//   (sum_j v_j v_j^T + lambda I) u = sum_j r_j v_j
// over the row's observed entries. Throws Error("singular") when lambda = 0
// and a row's design is rank deficient.
void alt_min_inplace(const TrainSet& train, FactorModel& model, int iters);
FactorModel alt_min(const TrainSet& train, FactorModel model, int iters);

// Half-sweeps, exposed for monotonicity checks.
void update_users(const TrainSet& train, FactorModel& model);
void update_items(const TrainSet& train, FactorModel& model);

// Squared error over observed entries + lambda ||U||^2 + lambda ||V||^2.
double masked_objective(const TrainSet& train, const FactorModel& model);

double predict(const FactorModel& model, int user, int item);

// Items sorted by descending score, ties by ascending index; at most k.
std::vector<int> top_k(const FactorModel& model, int user, std::span<const int> candidates,
                       std::size_t k);

// Text checkpoint with %.17g values (exact double round trip).
void save_model(const FactorModel& model, const std::filesystem::path& path);
FactorModel load_model(const std::filesystem::path& path);

}  // namespace advrec
