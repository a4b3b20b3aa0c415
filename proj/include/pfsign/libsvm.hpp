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

#ifndef PFSIGN_LIBSVM_HPP
#define PFSIGN_LIBSVM_HPP

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "pfsign/kernels.hpp"

namespace pfsign {

/// Sparse binary-classification dataset. features.n_cols is the dimension.
struct LibsvmDataset {
  CsrMatrix features;
  std::vector<double> labels;

  std::size_t dim() const noexcept { return features.n_cols; }
  std::size_t size() const noexcept { return labels.size(); }
  bool operator==(const LibsvmDataset&) const = default;
};

enum class LabelScheme { pm_one, zero_one };

/// Parses "label idx:val ..." lines with 1-based, strictly increasing
/// indices. '#' starts a comment. Blank lines are skipped. The dimension is
/// the largest index seen unless `dim` is given, in which case it must cover
/// every index. Throws ParseError (with line number) or DimensionError.
LibsvmDataset parse_libsvm(std::string_view text, std::optional<std::size_t> dim = {});
LibsvmDataset parse_libsvm(std::istream& in, std::optional<std::size_t> dim = {});

/// Reads a file; names ending in ".gz" are decompressed on the fly.
LibsvmDataset load_libsvm(const std::filesystem::path& path,
                          std::optional<std::size_t> dim = {});

/// Writes in a form parse_libsvm reads back exactly (17 significant digits).
void write_libsvm(const LibsvmDataset& ds, std::ostream& out);

/// Maps the smaller of exactly two distinct labels to -1 (pm_one) or 0
/// (zero_one) and the larger to 1.
LibsvmDataset normalize_labels(const LibsvmDataset& ds, LabelScheme scheme);

/// Divides every column by its largest absolute value (columns that are all
/// zero are left alone).
LibsvmDataset max_abs_scale(const LibsvmDataset& ds);

/// Keeps the given rows, in the given order. Dimension is unchanged.
LibsvmDataset select_rows(const LibsvmDataset& ds, const std::vector<std::size_t>& rows);

}  // namespace pfsign

#endif  // PFSIGN_LIBSVM_HPP
