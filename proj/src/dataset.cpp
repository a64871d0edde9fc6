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

#include "advrec/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "advrec/error.hpp"
#include "advrec/rng.hpp"

namespace advrec {

const char* const kGenreNames[kNumGenres] = {
    "unknown", "Action",   "Adventure", "Animation", "Children's", "Comedy",  "Crime",
    "Documentary", "Drama", "Fantasy",  "Film-Noir", "Horror",    "Musical", "Mystery",
    "Romance", "Sci-Fi",   "Thriller",  "War",       "Western"};

RatingMatrix::RatingMatrix(int n_users, int n_items, std::vector<Rating> entries,
                           std::vector<std::int64_t> user_ids,
                           std::vector<std::int64_t> item_ids)
    : n_users_(n_users), n_items_(n_items), entries_(std::move(entries)),
      user_ids_(std::move(user_ids)), item_ids_(std::move(item_ids)) {
  if (n_users < 0 || n_items < 0) throw Error("range", "negative matrix dimension");
  for (const Rating& r : entries_) {
    if (r.user < 0 || r.user >= n_users_ || r.item < 0 || r.item >= n_items_)
      throw Error("range", "rating index out of range");
    if (r.value < kMinRating || r.value > kMaxRating)
      throw Error("range", "rating " + std::to_string(r.value) + " outside [1,5]");
  }
  std::sort(entries_.begin(), entries_.end(), [](const Rating& a, const Rating& b) {
    return a.user != b.user ? a.user < b.user : a.item < b.item;
  });
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].user == entries_[i - 1].user && entries_[i].item == entries_[i - 1].item)
      throw Error("duplicate", "duplicate rating for user index " +
                                   std::to_string(entries_[i].user) + ", item index " +
                                   std::to_string(entries_[i].item));
  }
  if (user_ids_.empty()) {
    user_ids_.resize(n_users_);
    std::iota(user_ids_.begin(), user_ids_.end(), 1);
  }
  if (item_ids_.empty()) {
    item_ids_.resize(n_items_);
    std::iota(item_ids_.begin(), item_ids_.end(), 1);
  }
  if (static_cast<int>(user_ids_.size()) != n_users_ ||
      static_cast<int>(item_ids_.size()) != n_items_)
    throw Error("range", "id map length does not match matrix dimension");
}

std::vector<int> RatingMatrix::user_counts() const {
  std::vector<int> c(n_users_, 0);
  for (const Rating& r : entries_) ++c[r.user];
  return c;
}

std::vector<int> RatingMatrix::item_counts() const {
  std::vector<int> c(n_items_, 0);
  for (const Rating& r : entries_) ++c[r.item];
  return c;
}

std::string to_string(SplitMode mode) {
  switch (mode) {
    case SplitMode::kE1: return "E1";
    case SplitMode::kE2a: return "E2a";
    case SplitMode::kE2b: return "E2b";
  }
  return "?";
}

SplitMode parse_split_mode(const std::string& s) {
  if (s == "E1" || s == "e1") return SplitMode::kE1;
  if (s == "E2a" || s == "e2a" || s == "E2-a") return SplitMode::kE2a;
  if (s == "E2b" || s == "e2b" || s == "E2-b") return SplitMode::kE2b;
  throw Error("config", "unknown split mode '" + s + "'");
}

DatasetFormat parse_dataset_format(const std::string& s) {
  if (s == "ml100k") return DatasetFormat::kMl100k;
  if (s == "ml1m") return DatasetFormat::kMl1m;
  throw Error("config", "unknown dataset format '" + s + "'");
}

namespace {

std::vector<std::string> split_fields(const std::string& line, const std::string& sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + sep.size();
  }
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

std::int64_t parse_int(const std::string& s, const std::filesystem::path& file, int line_no) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error("parse", file.string() + ":" + std::to_string(line_no) +
                             ": malformed integer field '" + s + "'");
  }
}

std::ifstream open_required(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing_file", "missing file " + path.string());
  return in;
}

struct RawRating {
  std::int64_t user, item;
  int value;
};

std::vector<RawRating> read_raw_ratings(const std::filesystem::path& path, const std::string& sep) {
  std::ifstream in = open_required(path);
  std::vector<RawRating> raw;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto f = split_fields(line, sep);
    if (f.size() < 3)
      throw Error("parse", path.string() + ":" + std::to_string(line_no) +
                               ": expected at least 3 fields");
    std::int64_t value = parse_int(f[2], path, line_no);
    if (value < kMinRating || value > kMaxRating)
      throw Error("range", path.string() + ":" + std::to_string(line_no) + ": rating " +
                               std::to_string(value) + " outside [1,5]");
    raw.push_back({parse_int(f[0], path, line_no), parse_int(f[1], path, line_no),
                   static_cast<int>(value)});
  }
  if (raw.empty()) throw Error("empty", path.string() + ": no entries");
  return raw;
}

std::vector<std::int64_t> sorted_unique(std::vector<std::int64_t> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::unordered_map<std::int64_t, int> index_of(const std::vector<std::int64_t>& ids) {
  std::unordered_map<std::int64_t, int> m;
  for (std::size_t i = 0; i < ids.size(); ++i) m.emplace(ids[i], static_cast<int>(i));
  return m;
}

RatingMatrix from_raw(const std::vector<RawRating>& raw) {
  std::vector<std::int64_t> uids, iids;
  for (const auto& r : raw) {
    uids.push_back(r.user);
    iids.push_back(r.item);
  }
  uids = sorted_unique(std::move(uids));
  iids = sorted_unique(std::move(iids));
  auto uidx = index_of(uids);
  auto iidx = index_of(iids);
  std::vector<Rating> entries;
  entries.reserve(raw.size());
  for (const auto& r : raw) entries.push_back({uidx.at(r.user), iidx.at(r.item), r.value});
  const int n_users = static_cast<int>(uids.size());
  const int n_items = static_cast<int>(iids.size());
  return RatingMatrix(n_users, n_items, std::move(entries), std::move(uids), std::move(iids));
}

void read_users(const std::filesystem::path& path, const std::string& sep, int age_field,
                int gender_field, const RatingMatrix& m, SideInfo& side) {
  if (!std::filesystem::exists(path)) return;
  std::ifstream in = open_required(path);
  auto uidx = index_of(m.user_ids());
  std::vector<int> age(m.n_users(), 0);
  std::vector<Gender> gender(m.n_users(), Gender::kMale);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto f = split_fields(line, sep);
    if (static_cast<int>(f.size()) <= std::max(age_field, gender_field))
      throw Error("parse", path.string() + ":" + std::to_string(line_no) + ": too few fields");
    auto it = uidx.find(parse_int(f[0], path, line_no));
    if (it == uidx.end()) continue;
    age[it->second] = static_cast<int>(parse_int(f[age_field], path, line_no));
    const std::string& g = f[gender_field];
    if (g == "M") gender[it->second] = Gender::kMale;
    else if (g == "F") gender[it->second] = Gender::kFemale;
    else
      throw Error("parse", path.string() + ":" + std::to_string(line_no) + ": bad gender '" +
                               g + "'");
  }
  side.user_age = std::move(age);
  side.user_gender = std::move(gender);
}

}  // namespace

Dataset ingest(DatasetFormat format, const std::filesystem::path& dir) {
  Dataset ds;
  if (format == DatasetFormat::kMl100k) {
    ds.ratings = from_raw(read_raw_ratings(dir / "u.data", "\t"));
    const auto item_path = dir / "u.item";
    if (std::filesystem::exists(item_path)) {
      std::ifstream in = open_required(item_path);
      auto iidx = index_of(ds.ratings.item_ids());
      std::vector<std::bitset<kNumGenres>> genres(ds.ratings.n_items());
      std::string line;
      int line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto f = split_fields(line, "|");
        if (f.size() < 5 + kNumGenres)
          throw Error("parse", item_path.string() + ":" + std::to_string(line_no) +
                                   ": expected 19 genre flags");
        auto it = iidx.find(parse_int(f[0], item_path, line_no));
        if (it == iidx.end()) continue;
        const std::size_t base = f.size() - kNumGenres;
        for (int g = 0; g < kNumGenres; ++g)
          genres[it->second][g] = parse_int(f[base + g], item_path, line_no) != 0;
      }
      ds.side.item_genres = std::move(genres);
    }
    read_users(dir / "u.user", "|", 1, 2, ds.ratings, ds.side);
  } else {
    ds.ratings = from_raw(read_raw_ratings(dir / "ratings.dat", "::"));
    const auto movie_path = dir / "movies.dat";
    if (std::filesystem::exists(movie_path)) {
      std::ifstream in = open_required(movie_path);
      auto iidx = index_of(ds.ratings.item_ids());
      std::vector<std::bitset<kNumGenres>> genres(ds.ratings.n_items());
      std::map<std::string, int> by_name;
      for (int g = 0; g < kNumGenres; ++g) by_name[kGenreNames[g]] = g;
      std::string line;
      int line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto f = split_fields(line, "::");
        if (f.size() < 3)
          throw Error("parse", movie_path.string() + ":" + std::to_string(line_no) +
                                   ": expected id::title::genres");
        auto it = iidx.find(parse_int(f[0], movie_path, line_no));
        if (it == iidx.end()) continue;
        for (const auto& name : split_fields(f.back(), "|")) {
          auto g = by_name.find(name);
          if (g != by_name.end()) genres[it->second][g->second] = true;
        }
      }
      ds.side.item_genres = std::move(genres);
    }
    read_users(dir / "users.dat", "::", 2, 1, ds.ratings, ds.side);
  }
  return ds;
}

DatasetSplit split(const RatingMatrix& data, SplitMode mode, std::uint64_t seed) {
  DatasetSplit out;
  out.mode = mode;
  if (mode == SplitMode::kE1) {
    out.train = data.entries();
    return out;
  }
  Rng rng(seed);
  const auto& e = data.entries();
  std::size_t start = 0;
  while (start < e.size()) {
    std::size_t end = start;
    while (end < e.size() && e[end].user == e[start].user) ++end;
    std::vector<Rating> mine(e.begin() + start, e.begin() + end);
    const std::size_t c = mine.size();
    if (mode == SplitMode::kE2a) {
      if (c < 3) {
        out.train.insert(out.train.end(), mine.begin(), mine.end());
      } else {
        // Uniform choice of the held-out pair: partial Fisher-Yates on two slots.
        for (std::size_t i = 0; i < 2; ++i) {
          std::size_t j = i + rng.uniform_index(c - i);
          std::swap(mine[i], mine[j]);
        }
        out.target.push_back(mine[0]);
        out.test.push_back(mine[1]);
        out.train.insert(out.train.end(), mine.begin() + 2, mine.end());
      }
    } else {
      rng.shuffle(mine);
      const std::size_t n_train = c * 8 / 10;
      const std::size_t n_target = c / 10;
      out.train.insert(out.train.end(), mine.begin(), mine.begin() + n_train);
      out.target.insert(out.target.end(), mine.begin() + n_train,
                        mine.begin() + n_train + n_target);
      out.test.insert(out.test.end(), mine.begin() + n_train + n_target, mine.end());
    }
    start = end;
  }
  auto by_cell = [](const Rating& a, const Rating& b) {
    return a.user != b.user ? a.user < b.user : a.item < b.item;
  };
  std::sort(out.train.begin(), out.train.end(), by_cell);
  std::sort(out.target.begin(), out.target.end(), by_cell);
  std::sort(out.test.begin(), out.test.end(), by_cell);
  return out;
}

double to_symmetric_scale(double rating) {
  if (!(rating >= 0.0 && rating <= 5.0))
    throw Error("range", "rating " + std::to_string(rating) + " outside [0,5]");
  return (rating - 2.5) / 2.5;
}

double from_symmetric_scale(double value) {
  if (!(value >= -1.0 && value <= 1.0))
    throw Error("range", "value " + std::to_string(value) + " outside [-1,1]");
  return value * 2.5 + 2.5;
}

RatingMatrix synth(const SynthOptions& o) {
  if (o.n_users <= 0 || o.n_items <= 0 || o.rank <= 0 || o.rank > std::min(o.n_users, o.n_items))
    throw Error("range", "synth: invalid dimensions");
  if (!(o.density > 0.0 && o.density <= 1.0))
    throw Error("range", "synth: density must lie in (0,1]");
  if (o.noise_sd < 0.0) throw Error("range", "synth: noise_sd must be non-negative");
  Rng rng(o.seed);
  // Standard normal factors; the product is divided by sqrt(rank) so it has
  // unit variance, then centered on 3.
  std::vector<double> u(static_cast<std::size_t>(o.n_users) * o.rank);
  std::vector<double> v(static_cast<std::size_t>(o.n_items) * o.rank);
  for (double& x : u) x = rng.normal();
  for (double& x : v) x = rng.normal();
  const double scale = 1.0 / std::sqrt(static_cast<double>(o.rank));
  std::vector<Rating> entries;
  for (int i = 0; i < o.n_users; ++i) {
    for (int j = 0; j < o.n_items; ++j) {
      const bool keep = o.density >= 1.0 || rng.uniform() < o.density;
      const double noise = o.noise_sd > 0.0 ? o.noise_sd * rng.normal() : 0.0;
      if (!keep) continue;
      double dot = 0.0;
      for (int k = 0; k < o.rank; ++k) dot += u[i * o.rank + k] * v[j * o.rank + k];
      const double value = 3.0 + scale * dot + noise;
      entries.push_back({i, j, static_cast<int>(std::clamp(std::round(value), 1.0, 5.0))});
    }
  }
  return RatingMatrix(o.n_users, o.n_items, std::move(entries));
}

void write_ratings_csv(const RatingMatrix& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot write " + path.string());
  out << "user_id,item_id,rating\n";
  for (const Rating& r : data.entries())
    out << data.user_ids()[r.user] << ',' << data.item_ids()[r.item] << ',' << r.value << '\n';
  if (!out) throw Error("io", "write failed for " + path.string());
}

RatingMatrix read_ratings_csv(const std::filesystem::path& path) {
  std::ifstream in = open_required(path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "user_id,item_id,rating")
    throw Error("parse", path.string() + ":1: expected header user_id,item_id,rating");
  std::vector<RawRating> raw;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto f = split_fields(line, ",");
    if (f.size() != 3)
      throw Error("parse", path.string() + ":" + std::to_string(line_no) + ": expected 3 fields");
    std::int64_t value = parse_int(f[2], path, line_no);
    if (value < kMinRating || value > kMaxRating)
      throw Error("range", path.string() + ":" + std::to_string(line_no) + ": rating " +
                               std::to_string(value) + " outside [1,5]");
    raw.push_back({parse_int(f[0], path, line_no), parse_int(f[1], path, line_no),
                   static_cast<int>(value)});
  }
  if (raw.empty()) throw Error("empty", path.string() + ": no entries");
  return from_raw(raw);
}

}  // namespace advrec
