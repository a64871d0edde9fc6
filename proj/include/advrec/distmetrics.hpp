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

#include <array>
#include <vector>

#include "advrec/dataset.hpp"
#include "advrec/profiles.hpp"

namespace advrec {

// Fraction of all users (raters or not) whose rating of the item falls into
// each of the six bins 0..5; bin 0 is "unrated". Symmetric-scale bin centers
// are -1.0, -0.6, -0.2, 0.2, 0.6, 1.0.
using ItemMarginal = std::array<double, 6>;

struct EigenSummary {
  std::vector<double> top_eigs;  // descending, length 10 (zero padded)
};

inline constexpr int kTopEigs = 10;

// Dense rating-scale profiles (rows = users); values are rounded to the
// nearest bin.
std::vector<ItemMarginal> marginals(const RowMatrix& profiles);
std::vector<ItemMarginal> marginals(const RatingMatrix& data);

double tvd(const ItemMarginal& p, const ItemMarginal& q);
// Natural log; terms with p_b = 0 contribute nothing.
double js(const ItemMarginal& p, const ItemMarginal& q);

struct MeanDistance {
  double mean_tvd = 0.0;
  double mean_js = 0.0;
};

MeanDistance mean_distance(const std::vector<ItemMarginal>& real,
                           const std::vector<ItemMarginal>& fake);
// Fake must be in rating scale; it is rounded before binning.
MeanDistance mean_distance(const RatingMatrix& real, const FakeProfileMatrix& fake);

// Top eigenvalues of the item Gram matrix P^T P, as squared singular values of P.
EigenSummary eigensummary(const RowMatrix& profiles);

// max_i |fake_i / real_i - 1| over the entries with real_i > 0.
double max_relative_deviation(const EigenSummary& real, const EigenSummary& fake);

RowMatrix dense_ratings(const RatingMatrix& data);

}  // namespace advrec
