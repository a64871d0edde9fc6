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

#include "advrec/distmetrics.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "advrec/error.hpp"

namespace advrec {

namespace {

int bin_of(double rating) { return static_cast<int>(std::clamp(std::round(rating), 0.0, 5.0)); }

}  // namespace

std::vector<ItemMarginal> marginals(const RowMatrix& profiles) {
  const auto n = profiles.rows();
  std::vector<ItemMarginal> out(profiles.cols(), ItemMarginal{});
  if (n == 0) {
    for (auto& p : out) p[0] = 1.0;
    return out;
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < profiles.cols(); ++j) out[j][bin_of(profiles(i, j))] += 1.0;
  for (auto& p : out)
    for (double& v : p) v /= static_cast<double>(n);
  return out;
}

std::vector<ItemMarginal> marginals(const RatingMatrix& data) {
  std::vector<ItemMarginal> out(data.n_items(), ItemMarginal{});
  if (data.n_users() == 0) {
    for (auto& p : out) p[0] = 1.0;
    return out;
  }
  const double n = data.n_users();
  std::vector<int> rated(data.n_items(), 0);
  for (const Rating& r : data.entries()) {
    out[r.item][r.value] += 1.0;
    ++rated[r.item];
  }
  for (int j = 0; j < data.n_items(); ++j) {
    out[j][0] = static_cast<double>(data.n_users() - rated[j]);
    for (double& v : out[j]) v /= n;
  }
  return out;
}

double tvd(const ItemMarginal& p, const ItemMarginal& q) {
  double s = 0.0;
  for (std::size_t b = 0; b < p.size(); ++b) s += std::abs(p[b] - q[b]);
  return 0.5 * s;
}

double js(const ItemMarginal& p, const ItemMarginal& q) {
  double s = 0.0;
  for (std::size_t b = 0; b < p.size(); ++b) {
    const double m = 0.5 * (p[b] + q[b]);
    if (p[b] > 0.0) s += 0.5 * p[b] * std::log(p[b] / m);
    if (q[b] > 0.0) s += 0.5 * q[b] * std::log(q[b] / m);
  }
  return std::max(0.0, s);
}

MeanDistance mean_distance(const std::vector<ItemMarginal>& real,
                           const std::vector<ItemMarginal>& fake) {
  if (real.size() != fake.size()) throw Error("range", "mean_distance: item counts differ");
  MeanDistance d;
  if (real.empty()) return d;
  for (std::size_t j = 0; j < real.size(); ++j) {
    d.mean_tvd += tvd(real[j], fake[j]);
    d.mean_js += js(real[j], fake[j]);
  }
  d.mean_tvd /= static_cast<double>(real.size());
  d.mean_js /= static_cast<double>(real.size());
  return d;
}

MeanDistance mean_distance(const RatingMatrix& real, const FakeProfileMatrix& fake) {
  if (fake.scale() != Scale::kRating)
    throw Error("scale", "mean_distance expects fake profiles in rating scale");
  if (fake.n_items() != real.n_items()) throw Error("range", "mean_distance: item counts differ");
  return mean_distance(marginals(real), marginals(round_ratings(fake.values())));
}

EigenSummary eigensummary(const RowMatrix& profiles) {
  if (profiles.rows() < 1) throw Error("range", "eigensummary needs at least one profile");
  Eigen::BDCSVD<Eigen::MatrixXd> svd{Eigen::MatrixXd(profiles)};
  const Eigen::VectorXd& s = svd.singularValues();
  EigenSummary out;
  out.top_eigs.assign(kTopEigs, 0.0);
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(kTopEigs, s.size()); ++i)
    out.top_eigs[i] = s[i] * s[i];
  return out;
}

double max_relative_deviation(const EigenSummary& real, const EigenSummary& fake) {
  if (real.top_eigs.size() != fake.top_eigs.size())
    throw Error("range", "eigen summaries differ in length");
  double worst = 0.0;
  for (std::size_t i = 0; i < real.top_eigs.size(); ++i) {
    if (real.top_eigs[i] <= 0.0) continue;
    worst = std::max(worst, std::abs(fake.top_eigs[i] / real.top_eigs[i] - 1.0));
  }
  return worst;
}

RowMatrix dense_ratings(const RatingMatrix& data) {
  RowMatrix x = RowMatrix::Zero(data.n_users(), data.n_items());
  for (const Rating& r : data.entries()) x(r.user, r.item) = r.value;
  return x;
}

}  // namespace advrec
