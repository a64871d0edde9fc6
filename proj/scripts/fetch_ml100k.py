#!/usr/bin/env python3
# Copyright 2026 The advrec Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Materialize MovieLens 100K (u.data, u.item, u.user) in its original text layout.

GroupLens hosts the canonical zip. When that host is unreachable the script
falls back to the copy bundled inside the pytorch-widedeep wheel, which ships
the same three tables as parquet in the original row order.
"""

import argparse
import io
import math
import pathlib
import subprocess
import sys
import tempfile
import urllib.request
import zipfile

GROUPLENS_URL = "https://files.grouplens.org/datasets/movielens/ml-100k.zip"
WHEEL_PREFIX = "pytorch_widedeep/datasets/data/MovieLens100k_"
GENRES = ["unknown", "Action", "Adventure", "Animation", "Children's", "Comedy", "Crime",
          "Documentary", "Drama", "Fantasy", "Film-Noir", "Horror", "Musical", "Mystery",
          "Romance", "Sci-Fi", "Thriller", "War", "Western"]


def from_grouplens(out: pathlib.Path) -> bool:
    try:
        with urllib.request.urlopen(GROUPLENS_URL, timeout=20) as resp:
            blob = resp.read()
    except OSError:
        return False
    with zipfile.ZipFile(io.BytesIO(blob)) as z:
        for name in ("u.data", "u.item", "u.user", "u.genre"):
            out.joinpath(name).write_bytes(z.read(f"ml-100k/{name}"))
    return True


def field(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return str(v)


def from_wheel(out: pathlib.Path) -> None:
    import pandas as pd

    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps", "-q",
                        "pytorch-widedeep==1.7.0", "-d", tmp], check=True)
        wheel = next(pathlib.Path(tmp).glob("pytorch_widedeep-*.whl"))
        with zipfile.ZipFile(wheel) as z:
            frames = {part: pd.read_parquet(io.BytesIO(z.read(f"{WHEEL_PREFIX}{part}.parquet.brotli")))
                      for part in ("data", "items", "users")}

    data = frames["data"]
    with open(out / "u.data", "w", encoding="latin-1", newline="\n") as f:
        for row in data.itertuples(index=False):
            f.write(f"{row.user_id}\t{row.movie_id}\t{row.rating}\t{row.timestamp}\n")

    items = frames["items"]
    with open(out / "u.item", "w", encoding="latin-1", newline="\n") as f:
        for _, row in items.iterrows():
            head = [field(row["movie_id"]), field(row["movie_title"]), field(row["release_date"]),
                    field(row["video_release_date"]), field(row["IMDb_URL"])]
            flags = [str(int(row[g])) for g in GENRES]
            f.write("|".join(head + flags) + "\n")

    users = frames["users"]
    with open(out / "u.user", "w", encoding="latin-1", newline="\n") as f:
        for row in users.itertuples(index=False):
            f.write(f"{row.user_id}|{row.age}|{row.gender}|{row.occupation}|{row.zip_code}\n")

    with open(out / "u.genre", "w", encoding="latin-1", newline="\n") as f:
        for i, g in enumerate(GENRES):
            f.write(f"{g}|{i}\n")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data/ml-100k", help="target directory")
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if (out / "u.data").exists():
        print(f"{out} already populated")
        return 0
    if not from_grouplens(out):
        print("grouplens unreachable, using the pytorch-widedeep bundle", file=sys.stderr)
        from_wheel(out)
    print(f"wrote MovieLens 100K to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
