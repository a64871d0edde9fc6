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

#include <filesystem>

#include "advrec/recommender.hpp"

namespace advrec {

enum class Scale { kSymmetric, kRating };

// Dense k x m fake-user ratings. Symmetric scale lives in [-1,1], rating scale
// in [0,5]; zero in rating scale means unrated.
class FakeProfileMatrix {
 public:
  FakeProfileMatrix() = default;
  FakeProfileMatrix(RowMatrix values, Scale scale);

  const RowMatrix& values() const { return values_; }
  Scale scale() const { return scale_; }
  int k() const { return static_cast<int>(values_.rows()); }
  int n_items() const { return static_cast<int>(values_.cols()); }

 private:
  RowMatrix values_;
  Scale scale_ = Scale::kRating;
};

// Nearest integer, clipped to [0,5]. Zero means unrated.
RowMatrix round_ratings(const RowMatrix& z);

// Rounded non-zero entries as CSV `fake_user,item,rating` (0-based indices).
void write_fake_csv(const FakeProfileMatrix& z, const std::filesystem::path& path);
// Reads the CSV back as a rating-scale matrix with the given item count.
FakeProfileMatrix read_fake_csv(const std::filesystem::path& path, int n_items, int k = 0);

}  // namespace advrec
