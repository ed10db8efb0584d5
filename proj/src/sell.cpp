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

#include "trilab/sparse.hpp"

namespace trilab {

SellMatrix csr_to_sell(const CsrMatrix& m, Index slice_width, const Permutation* row_order) {
  if (slice_width < 1) throw InvalidArgument("slice width must be >= 1");
  if (row_order && row_order->size() != m.n) throw DimensionError("row order size does not match matrix");
  SellMatrix s;
  s.n = m.n;
  s.slice_width = slice_width;
  const Index n_slices = (m.n + slice_width - 1) / slice_width;
  s.n_padded = n_slices * slice_width;
  if (row_order && !row_order->is_identity()) s.row_of = row_order->inverse();

  s.row_len.assign(s.n_padded, 0);
  for (Index pos = 0; pos < m.n; ++pos) {
    const Index r = s.source_row(pos);
    s.row_len[pos] = static_cast<Index>(m.row_ptr[r + 1] - m.row_ptr[r]);
  }
  s.slice_len.resize(n_slices);
  s.slice_ptr.assign(static_cast<std::size_t>(n_slices) + 1, 0);
  for (Index sl = 0; sl < n_slices; ++sl) {
    const auto first = s.row_len.begin() + static_cast<std::ptrdiff_t>(sl) * slice_width;
    s.slice_len[sl] = *std::max_element(first, first + slice_width);
    s.slice_ptr[sl + 1] = s.slice_ptr[sl] + static_cast<Offset>(s.slice_len[sl]) * slice_width;
  }

  s.col_idx.resize(s.slice_ptr.back());
  s.values.assign(s.slice_ptr.back(), 0.0);
  for (Index pos = 0; pos < s.n_padded; ++pos) {
    const Index sl = pos / slice_width;
    const Index lane = pos % slice_width;
    const Offset base = s.slice_ptr[sl] + lane;
    // Phantom rows past n have no column of their own; clamp into range.
    const Index self = pos < m.n ? s.source_row(pos) : std::max<Index>(m.n - 1, 0);
    Offset src = pos < m.n ? m.row_ptr[self] : 0;
    for (Index t = 0; t < s.slice_len[sl]; ++t) {
      const Offset dst = base + static_cast<Offset>(t) * slice_width;
      if (t < s.row_len[pos]) {
        s.col_idx[dst] = m.col_idx[src];
        s.values[dst] = m.values[src];
        ++src;
      } else {
        s.col_idx[dst] = self;
      }
    }
  }
  return s;
}

CsrMatrix sell_to_csr(const SellMatrix& s) {
  CsrMatrix m;
  m.n = s.n;
  m.row_ptr.assign(static_cast<std::size_t>(s.n) + 1, 0);
  for (Index pos = 0; pos < s.n; ++pos) m.row_ptr[s.source_row(pos) + 1] = s.row_len[pos];
  for (Index i = 0; i < s.n; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  m.col_idx.resize(m.row_ptr.back());
  m.values.resize(m.row_ptr.back());
  for (Index pos = 0; pos < s.n; ++pos) {
    const Index sl = pos / s.slice_width;
    const Offset base = s.slice_ptr[sl] + pos % s.slice_width;
    Offset dst = m.row_ptr[s.source_row(pos)];
    for (Index t = 0; t < s.row_len[pos]; ++t) {
      const Offset src = base + static_cast<Offset>(t) * s.slice_width;
      m.col_idx[dst] = s.col_idx[src];
      m.values[dst] = s.values[src];
      ++dst;
    }
  }
  m.try_index_diagonal();
  return m;
}

}  // namespace trilab
