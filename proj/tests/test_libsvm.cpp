// Copyright 2026 The pfsign Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <zlib.h>

#include "pfsign/errors.hpp"
#include "pfsign/libsvm.hpp"

using namespace pfsign;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("pfsign_test_" + name);
}

int error_line(const std::string& text) {
  try {
    parse_libsvm(text);
  } catch (const ParseError& e) {
    return static_cast<int>(e.line());
  }
  return -1;
}

}  // namespace

TEST_CASE("parse a single row") {
  const LibsvmDataset ds = parse_libsvm("+1 1:0.5 3:-2\n");
  REQUIRE(ds.size() == 1);
  CHECK(ds.labels[0] == 1.0);
  CHECK(ds.dim() == 3);
  const SparseRow r = ds.features.row(0);
  REQUIRE(r.nnz() == 2);
  CHECK(r.indices[0] == 0);
  CHECK(r.indices[1] == 2);
  CHECK(r.values[0] == 0.5);
  CHECK(r.values[1] == -2.0);
}

TEST_CASE("parse two rows infers dim") {
  const LibsvmDataset ds = parse_libsvm("-1 2:1\n+1 1:1\n");
  CHECK(ds.size() == 2);
  CHECK(ds.dim() == 2);
  CHECK(ds.labels == std::vector<double>{-1.0, 1.0});
}

TEST_CASE("comments, blank lines, CRLF and empty rows") {
  const LibsvmDataset ds = parse_libsvm("# header\n\n2 1:1 # trailing\r\n4\n   \n");
  CHECK(ds.size() == 2);
  CHECK(ds.features.row(1).nnz() == 0);
  CHECK(ds.labels[1] == 4.0);
}

TEST_CASE("parse errors carry line numbers") {
  CHECK(error_line("1 2:1 2:3\n") == 1);
  CHECK(error_line("1 1:1\n1 3:1 2:1\n") == 2);
  CHECK(error_line("1 1:1\n\n1 0:1\n") == 3);
  CHECK(error_line("x 1:1\n") == 1);
  CHECK(error_line("1 1:abc\n") == 1);
  CHECK(error_line("1 1\n") == 1);
  CHECK(error_line("1 1:nan\n") == 1);
  CHECK_THROWS_AS(parse_libsvm("# only a comment\n"), Error);
}

TEST_CASE("dimension override") {
  CHECK(parse_libsvm("1 2:1\n", 10).dim() == 10);
  CHECK_THROWS_AS(parse_libsvm("1 5:1\n", 3), DimensionError);
}

TEST_CASE("write then parse round-trips") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    LibsvmDataset ds;
    ds.features.n_cols = 40;
    for (int i = 0; i < 15; ++i) {
      std::vector<std::uint32_t> idx;
      std::vector<double> v;
      for (std::uint32_t j = 0; j < 40; ++j) {
        if (rng() % 4 == 0) {
          idx.push_back(j);
          v.push_back(nd(rng) * std::pow(10.0, static_cast<double>(rng() % 20) - 10.0));
        }
      }
      ds.features.push_row(idx, v);
      ds.labels.push_back(rng() % 2 ? 1.0 : -1.0);
    }
    std::ostringstream os;
    write_libsvm(ds, os);
    CHECK(parse_libsvm(os.str(), 40) == ds);
  }
}

TEST_CASE("load plain and gzip files") {
  const std::string text = "1 1:0.25 4:2\n-1 2:3\n";
  const auto plain = temp_path("plain.libsvm");
  const auto gz = temp_path("packed.libsvm.gz");
  {
    std::ofstream(plain) << text;
    gzFile f = gzopen(gz.c_str(), "wb");
    REQUIRE(f != nullptr);
    gzwrite(f, text.data(), static_cast<unsigned>(text.size()));
    gzclose(f);
  }
  const LibsvmDataset a = load_libsvm(plain);
  const LibsvmDataset b = load_libsvm(gz);
  CHECK(a == b);
  CHECK(a.dim() == 4);
  CHECK_THROWS_AS(load_libsvm(temp_path("missing.libsvm")), Error);
  std::filesystem::remove(plain);
  std::filesystem::remove(gz);
}

TEST_CASE("normalize_labels") {
  auto with_labels = [](std::vector<double> y) {
    LibsvmDataset ds;
    ds.features.n_cols = 1;
    for (std::size_t i = 0; i < y.size(); ++i) ds.features.push_row({}, {});
    ds.labels = std::move(y);
    return ds;
  };
  CHECK(normalize_labels(with_labels({1, -1}), LabelScheme::pm_one).labels ==
        std::vector<double>{1, -1});
  CHECK(normalize_labels(with_labels({2, 4}), LabelScheme::zero_one).labels ==
        std::vector<double>{0, 1});
  CHECK(normalize_labels(with_labels({4, 2, 2}), LabelScheme::pm_one).labels ==
        std::vector<double>{1, -1, -1});
  CHECK_THROWS_AS(normalize_labels(with_labels({1, 2, 3}), LabelScheme::pm_one), Error);
  CHECK_THROWS_AS(normalize_labels(with_labels({1, 1}), LabelScheme::pm_one), Error);
}

TEST_CASE("max_abs_scale and select_rows") {
  const LibsvmDataset ds = parse_libsvm("1 1:2 2:-4\n-1 1:-1\n1 2:2\n");
  const LibsvmDataset s = max_abs_scale(ds);
  CHECK(s.features.vals == std::vector<double>{1.0, -1.0, -0.5, 0.5});
  const LibsvmDataset sub = select_rows(ds, {2, 0, 2});
  CHECK(sub.size() == 3);
  CHECK(sub.labels == std::vector<double>{1, 1, 1});
  CHECK(sub.features.row(1).nnz() == 2);
  CHECK_THROWS_AS(select_rows(ds, {3}), DimensionError);
}
