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

#include "advrec/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "advrec/error.hpp"

namespace advrec {

FakeProfileMatrix::FakeProfileMatrix(RowMatrix values, Scale scale)
    : values_(std::move(values)), scale_(scale) {
  if (values_.rows() < 1) throw Error("range", "fake profile matrix needs k >= 1");
  const double lo = scale_ == Scale::kSymmetric ? -1.0 : 0.0;
  const double hi = scale_ == Scale::kSymmetric ? 1.0 : 5.0;
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    const double v = values_.data()[i];
    if (!(v >= lo && v <= hi)) throw Error("range", "fake profile value outside its scale");
  }
}

RowMatrix round_ratings(const RowMatrix& z) {
  return z.unaryExpr([](double v) { return std::clamp(std::round(v), 0.0, 5.0); });
}

void write_fake_csv(const FakeProfileMatrix& z, const std::filesystem::path& path) {
  if (z.scale() != Scale::kRating) throw Error("scale", "write_fake_csv expects rating scale");
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot write " + path.string());
  out << "fake_user,item,rating\n";
  const RowMatrix r = round_ratings(z.values());
  for (Eigen::Index i = 0; i < r.rows(); ++i)
    for (Eigen::Index j = 0; j < r.cols(); ++j)
      if (r(i, j) > 0.0) out << i << ',' << j << ',' << static_cast<int>(r(i, j)) << '\n';
  if (!out) throw Error("io", "write failed for " + path.string());
}

FakeProfileMatrix read_fake_csv(const std::filesystem::path& path, int n_items, int k) {
  std::ifstream in(path);
  if (!in) throw Error("missing_file", "missing file " + path.string());
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "fake_user,item,rating")
    throw Error("parse", path.string() + ":1: expected header fake_user,item,rating");
  struct Cell {
    int u, j, r;
  };
  std::vector<Cell> cells;
  int line_no = 1;
  int max_user = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    Cell c{};
    char a = 0, b = 0;
    std::istringstream ss(line);
    if (!(ss >> c.u >> a >> c.j >> b >> c.r) || a != ',' || b != ',' || c.u < 0 || c.j < 0 ||
        c.j >= n_items || c.r < 0 || c.r > 5)
      throw Error("parse", path.string() + ":" + std::to_string(line_no) + ": malformed row");
    max_user = std::max(max_user, c.u);
    cells.push_back(c);
  }
  const int rows = std::max(k, max_user + 1);
  if (rows < 1) throw Error("empty", path.string() + ": no entries");
  RowMatrix z = RowMatrix::Zero(rows, n_items);
  for (const auto& c : cells) z(c.u, c.j) = c.r;
  return FakeProfileMatrix(std::move(z), Scale::kRating);
}

}  // namespace advrec
