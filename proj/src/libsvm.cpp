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

#include "pfsign/libsvm.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <ostream>
#include <string>

#include "pfsign/errors.hpp"

namespace pfsign {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

double parse_double(std::string_view tok, std::size_t line, const char* what) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(tok.data(), end, v);
  if (tok.empty() || ec != std::errc() || p != end) {
    throw ParseError(line, std::string("malformed ") + what + " '" + std::string(tok) + "'");
  }
  if (!std::isfinite(v)) throw ParseError(line, std::string("non-finite ") + what);
  return v;
}

std::string read_gz(const std::filesystem::path& path) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (f == nullptr) throw Error("cannot open " + path.string());
  std::string out;
  char buf[1 << 16];
  int n = 0;
  while ((n = gzread(f, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(n));
  const bool bad = n < 0;
  gzclose(f);
  if (bad) throw Error("gzip read error in " + path.string());
  return out;
}

}  // namespace

LibsvmDataset parse_libsvm(std::string_view text, std::optional<std::size_t> dim) {
  LibsvmDataset ds;
  std::vector<std::uint32_t> idx;
  std::vector<double> val;
  std::size_t max_index = 0;
  std::size_t line_no = 0;

  while (!text.empty()) {
    ++line_no;
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    idx.clear();
    val.clear();
    bool have_label = false;
    double label = 0.0;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && is_space(line[pos])) ++pos;
      if (pos >= line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && !is_space(line[end])) ++end;
      std::string_view tok = line.substr(pos, end - pos);
      pos = end;

      if (!have_label) {
        label = parse_double(tok, line_no, "label");
        have_label = true;
        continue;
      }
      const std::size_t colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(line_no, "malformed feature '" + std::string(tok) + "'");
      }
      std::string_view is = tok.substr(0, colon);
      long long i = 0;
      auto [p, ec] = std::from_chars(is.data(), is.data() + is.size(), i);
      if (is.empty() || ec != std::errc() || p != is.data() + is.size()) {
        throw ParseError(line_no, "malformed index '" + std::string(is) + "'");
      }
      if (i < 1) throw ParseError(line_no, "index " + std::to_string(i) + " < 1");
      if (i > static_cast<long long>(UINT32_MAX)) throw ParseError(line_no, "index too large");
      const auto zero_based = static_cast<std::uint32_t>(i - 1);
      if (!idx.empty() && zero_based <= idx.back()) {
        throw ParseError(line_no, "non-increasing index " + std::to_string(i));
      }
      idx.push_back(zero_based);
      val.push_back(parse_double(tok.substr(colon + 1), line_no, "value"));
    }
    if (!have_label) continue;  // blank or comment-only line
    if (!idx.empty()) max_index = std::max<std::size_t>(max_index, idx.back() + 1);
    ds.features.push_row(idx, val);
    ds.labels.push_back(label);
  }

  if (ds.labels.empty()) throw Error("dataset has no rows");
  if (dim) {
    if (*dim < max_index) {
      throw DimensionError("dimension " + std::to_string(*dim) + " smaller than max index " +
                           std::to_string(max_index));
    }
    ds.features.n_cols = *dim;
  } else {
    ds.features.n_cols = max_index;
  }
  return ds;
}

LibsvmDataset parse_libsvm(std::istream& in, std::optional<std::size_t> dim) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_libsvm(std::string_view(text), dim);
}

LibsvmDataset load_libsvm(const std::filesystem::path& path, std::optional<std::size_t> dim) {
  if (path.extension() == ".gz") return parse_libsvm(std::string_view(read_gz(path)), dim);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return parse_libsvm(in, dim);
}

void write_libsvm(const LibsvmDataset& ds, std::ostream& out) {
  char buf[64];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", ds.labels[i]);
    out << buf;
    const SparseRow r = ds.features.row(i);
    for (std::size_t p = 0; p < r.nnz(); ++p) {
      std::snprintf(buf, sizeof buf, " %u:%.17g", r.indices[p] + 1, r.values[p]);
      out << buf;
    }
    out << '\n';
  }
}

LibsvmDataset normalize_labels(const LibsvmDataset& ds, LabelScheme scheme) {
  std::vector<double> distinct(ds.labels);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() != 2) {
    throw Error("expected exactly two distinct labels, found " + std::to_string(distinct.size()));
  }
  const double low = scheme == LabelScheme::pm_one ? -1.0 : 0.0;
  LibsvmDataset out = ds;
  for (double& y : out.labels) y = y == distinct[0] ? low : 1.0;
  return out;
}

LibsvmDataset max_abs_scale(const LibsvmDataset& ds) {
  std::vector<double> scale(ds.dim(), 0.0);
  for (std::size_t p = 0; p < ds.features.nnz(); ++p) {
    auto& s = scale[ds.features.col_idx[p]];
    s = std::max(s, std::abs(ds.features.vals[p]));
  }
  LibsvmDataset out = ds;
  for (std::size_t p = 0; p < out.features.nnz(); ++p) {
    const double s = scale[out.features.col_idx[p]];
    if (s > 0.0) out.features.vals[p] /= s;
  }
  return out;
}

LibsvmDataset select_rows(const LibsvmDataset& ds, const std::vector<std::size_t>& rows) {
  LibsvmDataset out;
  out.features.n_cols = ds.dim();
  for (std::size_t i : rows) {
    if (i >= ds.size()) throw DimensionError("row " + std::to_string(i) + " out of range");
    const SparseRow r = ds.features.row(i);
    out.features.push_row(r.indices, r.values);
    out.labels.push_back(ds.labels[i]);
  }
  return out;
}

}  // namespace pfsign
