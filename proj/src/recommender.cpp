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

#include "advrec/recommender.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "advrec/error.hpp"
#include "advrec/rng.hpp"

namespace advrec {

TrainSet::TrainSet(int n_rows, int n_items, std::vector<TrainTuple> tuples)
    : n_rows_(n_rows), n_items_(n_items), tuples_(std::move(tuples)) {
  row_ptr_.assign(n_rows_ + 1, 0);
  col_ptr_.assign(n_items_ + 1, 0);
  for (const auto& t : tuples_) {
    if (t.user < 0 || t.user >= n_rows_ || t.item < 0 || t.item >= n_items_)
      throw Error("range", "train tuple index out of range");
    if (!std::isfinite(t.rating)) throw Error("range", "non-finite train rating");
    ++row_ptr_[t.user + 1];
    ++col_ptr_[t.item + 1];
  }
  std::partial_sum(row_ptr_.begin(), row_ptr_.end(), row_ptr_.begin());
  std::partial_sum(col_ptr_.begin(), col_ptr_.end(), col_ptr_.begin());
  row_entries_.resize(tuples_.size());
  col_entries_.resize(tuples_.size());
  std::vector<std::size_t> rfill(row_ptr_.begin(), row_ptr_.end() - 1);
  std::vector<std::size_t> cfill(col_ptr_.begin(), col_ptr_.end() - 1);
  for (const auto& t : tuples_) {
    row_entries_[rfill[t.user]++] = {t.item, t.rating};
    col_entries_[cfill[t.item]++] = {t.user, t.rating};
  }
}

TrainSet make_train_set(std::span<const Rating> ratings, int n_rows, int n_items) {
  std::vector<TrainTuple> tuples;
  tuples.reserve(ratings.size());
  for (const Rating& r : ratings) tuples.push_back({r.user, r.item, static_cast<double>(r.value)});
  return TrainSet(n_rows, n_items, std::move(tuples));
}

FactorModel init_model(int n_prime, int m, int d, double lambda, std::uint64_t seed) {
  if (n_prime <= 0 || m <= 0 || d <= 0) throw Error("range", "init: all dimensions must be positive");
  if (lambda < 0.0) throw Error("range", "init: lambda must be non-negative");
  Rng rng(seed);
  FactorModel model;
  model.lambda = lambda;
  model.U.resize(n_prime, d);
  model.V.resize(m, d);
  for (Eigen::Index i = 0; i < model.U.size(); ++i) model.U.data()[i] = 0.1 * rng.normal();
  for (Eigen::Index i = 0; i < model.V.size(); ++i) model.V.data()[i] = 0.1 * rng.normal();
  return model;
}

namespace {

// Solves every row of `target` against the fixed `other` factors.
template <typename RowAccess>
void ridge_half_sweep(RowMatrix& target, const RowMatrix& other, double lambda, int n,
                      RowAccess&& entries_of) {
  const int d = static_cast<int>(target.cols());
  RowMatrix gathered;
  Eigen::VectorXd ratings;
  Eigen::MatrixXd gram(d, d);
  Eigen::VectorXd rhs(d);
  Eigen::LLT<Eigen::MatrixXd> llt(d);
  for (int i = 0; i < n; ++i) {
    auto entries = entries_of(i);
    if (entries.empty()) {
      if (lambda > 0.0) {
        target.row(i).setZero();
        continue;
      }
      throw Error("singular",
                  "ridge system is singular (row without observations); use lambda > 0");
    }
    const auto count = static_cast<Eigen::Index>(entries.size());
    gathered.resize(count, d);
    ratings.resize(count);
    for (Eigen::Index c = 0; c < count; ++c) {
      gathered.row(c) = other.row(entries[c].index);
      ratings[c] = entries[c].rating;
    }
    gram.noalias() = gathered.transpose() * gathered;
    gram.diagonal().array() += lambda;
    rhs.noalias() = gathered.transpose() * ratings;
    llt.compute(gram);
    if (llt.info() != Eigen::Success ||
        (lambda == 0.0 && llt.matrixLLT().diagonal().minCoeff() <= 1e-7 * std::sqrt(gram.trace())))
      throw Error("singular", "ridge system is rank deficient; use lambda > 0");
    target.row(i) = llt.solve(rhs).transpose();
  }
}

void check_shapes(const TrainSet& train, const FactorModel& model) {
  if (train.n_rows() != model.n_users() || train.n_items() != model.n_items())
    throw Error("range", "train set grid does not match factor model shape");
  if (model.U.cols() != model.V.cols()) throw Error("range", "factor ranks differ");
}

}  // namespace

void update_users(const TrainSet& train, FactorModel& model) {
  check_shapes(train, model);
  ridge_half_sweep(model.U, model.V, model.lambda, train.n_rows(),
                   [&](int u) { return train.row(u); });
}

void update_items(const TrainSet& train, FactorModel& model) {
  check_shapes(train, model);
  ridge_half_sweep(model.V, model.U, model.lambda, train.n_items(),
                   [&](int j) { return train.column(j); });
}

void alt_min_inplace(const TrainSet& train, FactorModel& model, int iters) {
  if (iters < 0) throw Error("range", "alt_min: negative iteration count");
  for (int it = 0; it < iters; ++it) {
    update_users(train, model);
    update_items(train, model);
  }
}

FactorModel alt_min(const TrainSet& train, FactorModel model, int iters) {
  if (iters < 1) throw Error("range", "alt_min: iters must be >= 1");
  alt_min_inplace(train, model, iters);
  return model;
}

double masked_objective(const TrainSet& train, const FactorModel& model) {
  check_shapes(train, model);
  double loss = 0.0;
  for (const auto& t : train.tuples()) {
    const double err = t.rating - model.U.row(t.user).dot(model.V.row(t.item));
    loss += err * err;
  }
  return loss + model.lambda * (model.U.squaredNorm() + model.V.squaredNorm());
}

double predict(const FactorModel& model, int user, int item) {
  if (user < 0 || user >= model.n_users() || item < 0 || item >= model.n_items())
    throw Error("range", "predict: index out of range");
  return model.U.row(user).dot(model.V.row(item));
}

std::vector<int> top_k(const FactorModel& model, int user, std::span<const int> candidates,
                       std::size_t k) {
  if (user < 0 || user >= model.n_users()) throw Error("range", "top_k: user out of range");
  std::vector<std::pair<double, int>> scored;
  scored.reserve(candidates.size());
  for (int j : candidates) scored.emplace_back(predict(model, user, j), j);
  const std::size_t n = std::min(k, scored.size());
  auto better = [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  };
  std::partial_sort(scored.begin(), scored.begin() + n, scored.end(), better);
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = scored[i].second;
  return out;
}

void save_model(const FactorModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot write " + path.string());
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", model.lambda);
  out << "advrec-factor-model n_prime=" << model.n_users() << " m=" << model.n_items()
      << " d=" << model.rank() << " lambda=" << buf << '\n';
  auto dump = [&](const RowMatrix& mat) {
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
      for (Eigen::Index c = 0; c < mat.cols(); ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", mat(i, c));
        out << (c ? "," : "") << buf;
      }
      out << '\n';
    }
  };
  dump(model.U);
  dump(model.V);
  if (!out) throw Error("io", "write failed for " + path.string());
}

FactorModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing_file", "missing file " + path.string());
  std::string header;
  std::getline(in, header);
  int n_prime = 0, m = 0, d = 0;
  double lambda = 0.0;
  if (std::sscanf(header.c_str(), "advrec-factor-model n_prime=%d m=%d d=%d lambda=%lf", &n_prime,
                  &m, &d, &lambda) != 4 || n_prime <= 0 || m <= 0 || d <= 0)
    throw Error("parse", path.string() + ":1: bad factor model header");
  FactorModel model;
  model.lambda = lambda;
  model.U.resize(n_prime, d);
  model.V.resize(m, d);
  int line_no = 1;
  auto fill = [&](RowMatrix& mat) {
    std::string line;
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
      ++line_no;
      if (!std::getline(in, line)) throw Error("parse", path.string() + ": truncated checkpoint");
      std::istringstream ss(line);
      std::string cell;
      for (Eigen::Index c = 0; c < mat.cols(); ++c) {
        if (!std::getline(ss, cell, ','))
          throw Error("parse", path.string() + ":" + std::to_string(line_no) + ": short row");
        mat(i, c) = std::strtod(cell.c_str(), nullptr);
      }
    }
  };
  fill(model.U);
  fill(model.V);
  return model;
}

}  // namespace advrec
