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

// Writes the small committed logistic fixtures under data/fixtures.
//
// The generated files mimic the layout of the a9a and w8a LIBSVM sets
// (binary sparse features, matching dimensions) with labels drawn from a
// planted linear model plus label noise. Re-running with the same seed
// reproduces the committed files byte for byte.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <vector>

#include "CLI11.hpp"
#include "pfsign/libsvm.hpp"
#include "pfsign/rng.hpp"

namespace {

using pfsign::LibsvmDataset;
using pfsign::Rng;

// 14 categorical groups whose sizes add up to 123; every row sets one
// indicator per group.
LibsvmDataset make_a9a_like(std::size_t rows, std::uint64_t seed) {
  const std::vector<std::size_t> groups = {5, 8, 16, 7, 14, 6, 5, 2, 10, 12, 10, 14, 4, 10};
  const std::size_t dim = std::accumulate(groups.begin(), groups.end(), std::size_t{0});
  Rng rng(pfsign::derive_seed(seed, "A9A"));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<double> w(dim);
  for (double& e : w) e = normal(rng);

  LibsvmDataset ds;
  ds.features.n_cols = dim;
  std::vector<double> margins;
  std::vector<std::vector<std::uint32_t>> all_idx;
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<std::uint32_t> idx;
    std::size_t base = 0;
    for (std::size_t g : groups) {
      // Skewed category frequencies, like the census attributes.
      const double u = unif(rng);
      const auto pick = static_cast<std::size_t>(std::floor(g * u * u));
      idx.push_back(static_cast<std::uint32_t>(base + std::min(pick, g - 1)));
      base += g;
    }
    double z = 0.0;
    for (auto i : idx) z += w[i];
    margins.push_back(z);
    all_idx.push_back(std::move(idx));
  }
  // Center the margins so both classes appear (about 25% positives).
  std::vector<double> sorted = margins;
  std::sort(sorted.begin(), sorted.end());
  const double cut = sorted[rows * 3 / 4];
  for (std::size_t r = 0; r < rows; ++r) {
    const std::vector<double> ones(all_idx[r].size(), 1.0);
    ds.features.push_row(all_idx[r], ones);
    double y = margins[r] >= cut ? 1.0 : -1.0;
    if (unif(rng) < 0.1) y = -y;
    ds.labels.push_back(y);
  }
  return ds;
}

// 300 binary features, each present with small probability; rare positives.
LibsvmDataset make_w8a_like(std::size_t rows, std::uint64_t seed) {
  const std::size_t dim = 300;
  Rng rng(pfsign::derive_seed(seed, "W8A"));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<double> w(dim), p(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    w[j] = normal(rng);
    p[j] = 0.08 * std::exp(-3.0 * unif(rng));  // a few common words, many rare ones
  }
  LibsvmDataset ds;
  ds.features.n_cols = dim;
  std::vector<double> margins;
  std::vector<std::vector<std::uint32_t>> all_idx;
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<std::uint32_t> idx;
    for (std::size_t j = 0; j < dim; ++j) {
      if (unif(rng) < p[j]) idx.push_back(static_cast<std::uint32_t>(j));
    }
    double z = 0.0;
    for (auto i : idx) z += w[i];
    margins.push_back(z);
    all_idx.push_back(std::move(idx));
  }
  std::vector<double> sorted = margins;
  std::sort(sorted.begin(), sorted.end());
  const double cut = sorted[rows * 9 / 10];
  for (std::size_t r = 0; r < rows; ++r) {
    const std::vector<double> ones(all_idx[r].size(), 1.0);
    ds.features.push_row(all_idx[r], ones);
    double y = margins[r] >= cut ? 1.0 : -1.0;
    if (unif(rng) < 0.05) y = -y;
    ds.labels.push_back(y);
  }
  return ds;
}

void write(const LibsvmDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  pfsign::write_libsvm(ds, out);
  std::cout << path.string() << ": " << ds.size() << " rows, dim " << ds.dim() << ", nnz "
            << ds.features.nnz() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the committed logistic fixtures"};
  std::string out_dir = "data/fixtures";
  std::size_t rows = 200;
  std::uint64_t seed = 20260101;
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--rows", rows, "rows per fixture")->check(CLI::Range(8, 200));
  app.add_option("--seed", seed, "generator seed");
  CLI11_PARSE(app, argc, argv);
  try {
    std::filesystem::create_directories(out_dir);
    write(make_a9a_like(rows, seed), std::filesystem::path(out_dir) / "a9a.libsvm");
    write(make_w8a_like(rows, seed), std::filesystem::path(out_dir) / "w8a.libsvm");
  } catch (const std::exception& e) {
    std::cerr << "make_fixtures: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
