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
#include <numeric>
#include <string>

#include "trilab/sparse.hpp"
#include "trilab/thread_pool.hpp"

namespace trilab {

Offset CsrMatrix::find(Index row, Index col) const noexcept {
  const auto c = cols(row);
  const auto it = std::lower_bound(c.begin(), c.end(), col);
  if (it == c.end() || *it != col) return -1;
  return row_ptr[row] + (it - c.begin());
}

void CsrMatrix::validate() const {
  auto fail = [](const std::string& msg) { throw InvalidArgument("invalid CSR matrix: " + msg); };
  if (n < 0) fail("negative dimension");
  if (row_ptr.size() != static_cast<std::size_t>(n) + 1) fail("row_ptr length != n+1");
  if (row_ptr.front() != 0) fail("row_ptr[0] != 0");
  if (col_idx.size() != static_cast<std::size_t>(nnz()) || values.size() != col_idx.size())
    fail("array lengths disagree with row_ptr[n]");
  if (!diag_ptr.empty() && diag_ptr.size() != static_cast<std::size_t>(n)) fail("diag_ptr length != n");
  for (Index i = 0; i < n; ++i) {
    if (row_ptr[i + 1] < row_ptr[i]) fail("row_ptr decreases at row " + std::to_string(i));
    for (Offset k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      if (col_idx[k] < 0 || col_idx[k] >= n) fail("column out of range in row " + std::to_string(i));
      if (k > row_ptr[i] && col_idx[k] <= col_idx[k - 1])
        fail("columns not strictly increasing in row " + std::to_string(i));
    }
    if (diag_ptr.empty()) continue;
    if (diag_ptr[i] < row_ptr[i] || diag_ptr[i] >= row_ptr[i + 1] || col_idx[diag_ptr[i]] != i)
      fail("diag_ptr wrong in row " + std::to_string(i));
  }
}

void CsrMatrix::index_diagonal() {
  diag_ptr.assign(n, -1);
  for (Index i = 0; i < n; ++i) {
    diag_ptr[i] = find(i, i);
    if (diag_ptr[i] < 0) throw InvalidArgument("row " + std::to_string(i) + " has no diagonal entry");
  }
}

bool CsrMatrix::try_index_diagonal() {
  diag_ptr.assign(n, -1);
  for (Index i = 0; i < n; ++i) {
    diag_ptr[i] = find(i, i);
    if (diag_ptr[i] < 0) {
      diag_ptr.clear();
      return false;
    }
  }
  return true;
}

bool CsrMatrix::structurally_symmetric() const {
  for (Index i = 0; i < n; ++i) {
    for (Index j : cols(i)) {
      if (find(j, i) < 0) return false;
    }
  }
  return true;
}

Offset SellMatrix::nnz() const noexcept {
  return std::accumulate(row_len.begin(), row_len.end(), Offset{0});
}

// Permutation

Permutation Permutation::identity(Index n) {
  Permutation p;
  p.forward_.resize(n);
  std::iota(p.forward_.begin(), p.forward_.end(), 0);
  p.inverse_ = p.forward_;
  return p;
}

Permutation Permutation::from_forward(std::vector<Index> forward) {
  const auto n = static_cast<Index>(forward.size());
  std::vector<Index> inverse(forward.size(), -1);
  for (Index i = 0; i < n; ++i) {
    const Index t = forward[i];
    if (t < 0 || t >= n || inverse[t] != -1)
      throw InvalidArgument("permutation is not a bijection (index " + std::to_string(i) + ")");
    inverse[t] = i;
  }
  Permutation p;
  p.forward_ = std::move(forward);
  p.inverse_ = std::move(inverse);
  return p;
}

Permutation Permutation::from_order(std::vector<Index> order) {
  return from_forward(std::move(order)).inverted();
}

Permutation Permutation::inverted() const {
  Permutation p;
  p.forward_ = inverse_;
  p.inverse_ = forward_;
  return p;
}

Permutation Permutation::then(const Permutation& next) const {
  if (next.size() != size()) throw DimensionError("cannot compose permutations of different size");
  std::vector<Index> f(forward_.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = next.forward_[forward_[i]];
  return from_forward(std::move(f));
}

bool Permutation::is_identity() const noexcept {
  for (std::size_t i = 0; i < forward_.size(); ++i) {
    if (forward_[i] != static_cast<Index>(i)) return false;
  }
  return true;
}

std::vector<double> Permutation::apply(std::span<const double> in) const {
  if (in.size() != forward_.size()) throw DimensionError("vector length does not match permutation");
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[forward_[i]] = in[i];
  return out;
}

std::vector<double> Permutation::unapply(std::span<const double> in) const {
  if (in.size() != forward_.size()) throw DimensionError("vector length does not match permutation");
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[forward_[i]];
  return out;
}

// Conversion

CsrMatrix coo_to_csr(const CooMatrix& m, Index* inserted_diagonals) {
  CsrMatrix out;
  out.n = m.n;
  std::vector<CooEntry> entries;
  entries.reserve(m.entries.size() + m.n);
  for (const auto& e : m.entries) {
    if (e.row < 0 || e.row >= m.n || e.col < 0 || e.col >= m.n)
      throw InvalidArgument("COO entry out of range");
    entries.push_back(e);
  }
  std::vector<char> has_diag(m.n, 0);
  for (const auto& e : entries) {
    if (e.row == e.col) has_diag[e.row] = 1;
  }
  Index inserted = 0;
  for (Index i = 0; i < m.n; ++i) {
    if (!has_diag[i]) {
      entries.push_back({i, i, 0.0});
      ++inserted;
    }
  }
  std::stable_sort(entries.begin(), entries.end(), [](const CooEntry& a, const CooEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  out.row_ptr.assign(static_cast<std::size_t>(m.n) + 1, 0);
  out.col_idx.reserve(entries.size());
  out.values.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& e = entries[k];
    if (!out.col_idx.empty() && k > 0 && entries[k - 1].row == e.row && entries[k - 1].col == e.col) {
      out.values.back() += e.value;
      continue;
    }
    out.col_idx.push_back(e.col);
    out.values.push_back(e.value);
    ++out.row_ptr[e.row + 1];
  }
  std::partial_sum(out.row_ptr.begin(), out.row_ptr.end(), out.row_ptr.begin());
  out.index_diagonal();
  if (inserted_diagonals) *inserted_diagonals = inserted;
  return out;
}

CsrMatrix permute_matrix(const CsrMatrix& a, const Permutation& p) {
  if (p.size() != a.n) throw DimensionError("permutation size does not match matrix");
  CsrMatrix out;
  out.n = a.n;
  out.row_ptr.assign(static_cast<std::size_t>(a.n) + 1, 0);
  for (Index i = 0; i < a.n; ++i) out.row_ptr[p(i) + 1] = a.row_ptr[i + 1] - a.row_ptr[i];
  std::partial_sum(out.row_ptr.begin(), out.row_ptr.end(), out.row_ptr.begin());
  out.col_idx.resize(a.col_idx.size());
  out.values.resize(a.values.size());
  std::vector<std::pair<Index, double>> row;
  for (Index i = 0; i < a.n; ++i) {
    row.clear();
    for (Offset k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) row.emplace_back(p(a.col_idx[k]), a.values[k]);
    std::sort(row.begin(), row.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    Offset dst = out.row_ptr[p(i)];
    for (const auto& [c, v] : row) {
      out.col_idx[dst] = c;
      out.values[dst] = v;
      ++dst;
    }
  }
  out.index_diagonal();
  return out;
}

LinearSystem permute_system(const CsrMatrix& a, std::span<const double> b, const Permutation& p) {
  if (b.size() != static_cast<std::size_t>(a.n)) throw DimensionError("right-hand side length does not match matrix");
  return {permute_matrix(a, p), p.apply(b)};
}

CsrMatrix append_identity(const CsrMatrix& a, Index k) {
  CsrMatrix out = a;
  out.n = a.n + k;
  for (Index i = 0; i < k; ++i) {
    out.col_idx.push_back(a.n + i);
    out.values.push_back(1.0);
    out.diag_ptr.push_back(out.row_ptr.back());
    out.row_ptr.push_back(out.row_ptr.back() + 1);
  }
  return out;
}

// SpMV

namespace {

void csr_rows(const CsrMatrix& m, std::span<const double> x, std::span<double> y, Index begin, Index end) {
  for (Index i = begin; i < end; ++i) {
    double sum = 0.0;
    for (Offset k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) sum += m.values[k] * x[m.col_idx[k]];
    y[i] = sum;
  }
}

void sell_slices(const SellMatrix& m, std::span<const double> x, std::span<double> y, Index begin, Index end) {
  const Index w = m.slice_width;
  std::vector<double> acc(w);
  for (Index s = begin; s < end; ++s) {
    std::fill(acc.begin(), acc.end(), 0.0);
    const Offset base = m.slice_ptr[s];
    for (Index t = 0; t < m.slice_len[s]; ++t) {
      const Offset off = base + static_cast<Offset>(t) * w;
      for (Index lane = 0; lane < w; ++lane) acc[lane] += m.values[off + lane] * x[m.col_idx[off + lane]];
    }
    for (Index lane = 0; lane < w; ++lane) {
      const Index pos = s * w + lane;
      if (pos < m.n) y[m.source_row(pos)] = acc[lane];
    }
  }
}

constexpr Index kSerialRows = 4096;

}  // namespace

void spmv(const CsrMatrix& m, std::span<const double> x, std::span<double> y, ThreadPool* pool) {
  if (x.size() != static_cast<std::size_t>(m.n) || y.size() != static_cast<std::size_t>(m.n))
    throw DimensionError("spmv: vector length does not match matrix dimension");
  if (!pool || pool->size() == 1 || m.n < kSerialRows) {
    csr_rows(m, x, y, 0, m.n);
    return;
  }
  pool->run([&](Team& team) {
    const auto [b, e] = team.share(static_cast<std::size_t>(m.n));
    csr_rows(m, x, y, static_cast<Index>(b), static_cast<Index>(e));
  });
}

void spmv(const SellMatrix& m, std::span<const double> x, std::span<double> y, ThreadPool* pool) {
  if (x.size() != static_cast<std::size_t>(m.n) || y.size() != static_cast<std::size_t>(m.n))
    throw DimensionError("spmv: vector length does not match matrix dimension");
  if (!pool || pool->size() == 1 || m.n < kSerialRows) {
    sell_slices(m, x, y, 0, m.n_slices());
    return;
  }
  pool->run([&](Team& team) {
    const auto [b, e] = team.share(static_cast<std::size_t>(m.n_slices()));
    sell_slices(m, x, y, static_cast<Index>(b), static_cast<Index>(e));
  });
}

std::vector<double> spmv(const CsrMatrix& m, std::span<const double> x) {
  std::vector<double> y(m.n);
  spmv(m, x, y);
  return y;
}

std::vector<double> spmv(const SellMatrix& m, std::span<const double> x) {
  std::vector<double> y(m.n);
  spmv(m, x, y);
  return y;
}

std::vector<double> to_dense(const CsrMatrix& m) {
  std::vector<double> d(static_cast<std::size_t>(m.n) * m.n, 0.0);
  for (Index i = 0; i < m.n; ++i) {
    for (Offset k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
      d[static_cast<std::size_t>(i) * m.n + m.col_idx[k]] = m.values[k];
  }
  return d;
}

}  // namespace trilab
