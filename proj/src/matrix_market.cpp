// Copyright 2026 The tri-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "trilab/sparse.hpp"

namespace trilab {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t b = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > b) out.push_back(line.substr(b, i - b));
  }
  return out;
}

template <typename T>
T parse_number(std::string_view tok, std::size_t line, const char* what) {
  T v{};
  const auto* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw IngestError(line, std::string("malformed ") + what + " '" + std::string(tok) + "'");
  return v;
}

}  // namespace

CooMatrix parse_matrix_market(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& out) {
    if (pos >= text.size()) return false;
    const std::size_t e = text.find('\n', pos);
    out = text.substr(pos, e == std::string_view::npos ? std::string_view::npos : e - pos);
    if (!out.empty() && out.back() == '\r') out.remove_suffix(1);
    pos = e == std::string_view::npos ? text.size() : e + 1;
    ++line_no;
    return true;
  };

  std::string_view line;
  if (!next_line(line)) throw IngestError(0, "empty MatrixMarket input");
  const auto banner = split_ws(line);
  if (banner.size() != 5 || lower(std::string(banner[0])) != "%%matrixmarket")
    throw IngestError(line_no, "missing %%MatrixMarket banner");
  if (lower(std::string(banner[1])) != "matrix" || lower(std::string(banner[2])) != "coordinate")
    throw IngestError(line_no, "only 'matrix coordinate' files are supported");
  const std::string field = lower(std::string(banner[3]));
  if (field != "real" && field != "integer" && field != "double")
    throw IngestError(line_no, "unsupported field '" + field + "', expected real");
  const std::string symmetry = lower(std::string(banner[4]));
  if (symmetry != "symmetric" && symmetry != "general")
    throw IngestError(line_no, "unsupported symmetry '" + symmetry + "'");
  const bool symmetric = symmetry == "symmetric";

  do {
    if (!next_line(line)) throw IngestError(line_no, "missing size line");
  } while (line.empty() || line.front() == '%' || split_ws(line).empty());

  const auto size_tok = split_ws(line);
  if (size_tok.size() != 3) throw IngestError(line_no, "size line must hold 'rows cols entries'");
  const auto rows = parse_number<long long>(size_tok[0], line_no, "row count");
  const auto cols = parse_number<long long>(size_tok[1], line_no, "column count");
  const auto count = parse_number<long long>(size_tok[2], line_no, "entry count");
  if (rows != cols) throw IngestError(line_no, "matrix is not square");
  if (rows < 0 || count < 0 || rows > std::numeric_limits<Index>::max())
    throw IngestError(line_no, "dimension out of range");

  CooMatrix m;
  m.n = static_cast<Index>(rows);
  m.stats.symmetric_source = symmetric;
  m.entries.reserve(static_cast<std::size_t>(symmetric ? 2 * count : count));
  long long seen = 0;
  while (seen < count) {
    if (!next_line(line)) throw IngestError(line_no, "file ends after " + std::to_string(seen) + " of " + std::to_string(count) + " entries");
    const auto tok = split_ws(line);
    if (tok.empty() || tok.front().front() == '%') continue;
    if (tok.size() != 3) throw IngestError(line_no, "entry must hold 'row col value'");
    const auto r = parse_number<long long>(tok[0], line_no, "row index");
    const auto c = parse_number<long long>(tok[1], line_no, "column index");
    const auto v = parse_number<double>(tok[2], line_no, "value");
    if (r < 1 || r > rows || c < 1 || c > cols)
      throw IngestError(line_no, "index (" + std::to_string(r) + ", " + std::to_string(c) + ") out of range for " +
                                     std::to_string(rows) + "x" + std::to_string(cols));
    ++seen;
    const auto i = static_cast<Index>(r - 1);
    const auto j = static_cast<Index>(c - 1);
    if (i != j && v == 0.0) {
      m.stats.dropped_zeros += symmetric ? 2 : 1;
      continue;
    }
    m.entries.push_back({i, j, v});
    if (symmetric && i != j) m.entries.push_back({j, i, v});
  }

  // Merge duplicates so the "no repeated (row, col)" invariant holds.
  std::stable_sort(m.entries.begin(), m.entries.end(), [](const CooEntry& a, const CooEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::size_t out = 0;
  for (std::size_t k = 0; k < m.entries.size(); ++k) {
    if (out > 0 && m.entries[out - 1].row == m.entries[k].row && m.entries[out - 1].col == m.entries[k].col) {
      m.entries[out - 1].value += m.entries[k].value;
      ++m.stats.merged_duplicates;
    } else {
      m.entries[out++] = m.entries[k];
    }
  }
  m.entries.resize(out);
  return m;
}

CooMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix_market(buf.str());
}

void write_matrix_market(const CsrMatrix& m, const std::filesystem::path& path) {
  bool symmetric = true;
  for (Index i = 0; i < m.n && symmetric; ++i) {
    for (Offset k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
      const Offset t = m.find(m.col_idx[k], i);
      if (t < 0 || m.values[t] != m.values[k]) {
        symmetric = false;
        break;
      }
    }
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  Offset count = 0;
  for (Index i = 0; i < m.n; ++i) {
    for (Index j : m.cols(i)) count += (!symmetric || j <= i) ? 1 : 0;
  }
  out << "%%MatrixMarket matrix coordinate real " << (symmetric ? "symmetric" : "general") << '\n';
  out << m.n << ' ' << m.n << ' ' << count << '\n';
  char buf[64];
  for (Index i = 0; i < m.n; ++i) {
    for (Offset k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
      const Index j = m.col_idx[k];
      if (symmetric && j > i) continue;
      const auto res = std::to_chars(buf, buf + sizeof buf, m.values[k]);
      out << (i + 1) << ' ' << (j + 1) << ' ' << std::string_view(buf, res.ptr - buf) << '\n';
    }
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

// Binary cache. Little-endian, see docs/formats.md.

namespace {

constexpr std::array<char, 8> kMagic{'T', 'R', 'L', 'B', 'C', 'S', 'R', '\0'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "CSR cache I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
void put_array(std::ostream& out, const std::vector<T>& v) {
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
void get(std::istream& in, T& v) {
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw IngestError(0, "truncated CSR cache");
}

template <typename T>
void get_array(std::istream& in, std::vector<T>& v, std::size_t n) {
  v.resize(n);
  if (!in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T))))
    throw IngestError(0, "truncated CSR cache");
}

}  // namespace

void write_csr_cache(const CsrMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(kMagic.data(), kMagic.size());
  put(out, kVersion);
  put(out, std::uint32_t{0});
  put(out, static_cast<std::uint64_t>(m.n));
  put(out, static_cast<std::uint64_t>(m.nnz()));
  put_array(out, m.row_ptr);
  put_array(out, m.col_idx);
  put_array(out, m.values);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

bool is_csr_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::array<char, 8> magic{};
  return in.read(magic.data(), magic.size()) && magic == kMagic;
}

CsrMatrix read_csr_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw IngestError(0, "not a CSR cache file");
  std::uint32_t version = 0, reserved = 0;
  std::uint64_t n = 0, nnz = 0;
  get(in, version);
  get(in, reserved);
  if (version != kVersion) throw IngestError(0, "unsupported CSR cache version " + std::to_string(version));
  get(in, n);
  get(in, nnz);
  if (n > static_cast<std::uint64_t>(std::numeric_limits<Index>::max())) throw IngestError(0, "cache dimension out of range");
  CsrMatrix m;
  m.n = static_cast<Index>(n);
  get_array(in, m.row_ptr, n + 1);
  get_array(in, m.col_idx, nnz);
  get_array(in, m.values, nnz);
  if (m.row_ptr.back() != static_cast<Offset>(nnz)) throw IngestError(0, "cache row_ptr disagrees with nnz");
  m.index_diagonal();
  m.validate();
  return m;
}

}  // namespace trilab
