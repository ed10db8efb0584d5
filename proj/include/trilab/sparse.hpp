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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "trilab/common.hpp"

namespace trilab {

class ThreadPool;

struct CooEntry {
  Index row;
  Index col;
  double value;
};

struct IngestStats {
  /// Off-diagonal entries with value exactly 0 that were discarded.
  std::size_t dropped_zeros = 0;
  /// Repeated (row, col) pairs folded into one entry by summation.
  std::size_t merged_duplicates = 0;
  bool symmetric_source = false;
};

/// Square coordinate matrix in full (symmetric-expanded) storage.
struct CooMatrix {
  Index n = 0;
  std::vector<CooEntry> entries;
  IngestStats stats;
};

/// Compressed row storage. Column indices are strictly increasing inside each
/// row and every row stores its diagonal; diag_ptr[i] is its position.
/// Strictly triangular factor parts reuse this type with diag_ptr empty.
struct CsrMatrix {
  Index n = 0;
  std::vector<Offset> row_ptr{0};
  std::vector<Index> col_idx;
  std::vector<double> values;
  std::vector<Offset> diag_ptr;

  Offset nnz() const noexcept { return row_ptr.empty() ? 0 : row_ptr.back(); }
  std::span<const Index> cols(Index row) const noexcept {
    return {col_idx.data() + row_ptr[row], static_cast<std::size_t>(row_ptr[row + 1] - row_ptr[row])};
  }
  std::span<const double> vals(Index row) const noexcept {
    return {values.data() + row_ptr[row], static_cast<std::size_t>(row_ptr[row + 1] - row_ptr[row])};
  }
  double diagonal(Index row) const noexcept { return values[diag_ptr[row]]; }

  /// Position of (row, col) or -1 when not stored.
  Offset find(Index row, Index col) const noexcept;

  /// Throws InvalidArgument naming the first broken invariant.
  void validate() const;

  /// Recomputes diag_ptr; throws InvalidArgument if a row lacks its diagonal.
  void index_diagonal();
  /// Like index_diagonal() but clears diag_ptr instead of throwing.
  bool try_index_diagonal();

  /// True if every stored (i, j) has (j, i) stored as well.
  bool structurally_symmetric() const;

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;
};

/// Sliced ELLPACK with slice height `slice_width`. Entry t of the row at
/// packed position r lives at slice_ptr[r / C] + t * C + r % C. Padding
/// entries have value 0 and point at the row's own index.
struct SellMatrix {
  Index n = 0;         // logical rows and columns
  Index n_padded = 0;  // n rounded up to a multiple of slice_width
  Index slice_width = 1;
  std::vector<Offset> slice_ptr{0};
  std::vector<Index> slice_len;
  std::vector<Index> row_len;  // per packed position; 0 for phantom rows
  std::vector<Index> col_idx;
  std::vector<double> values;
  /// Packed position -> source row. Empty means identity.
  std::vector<Index> row_of;

  Index n_slices() const noexcept { return static_cast<Index>(slice_len.size()); }
  /// Elements touched by one SpMV, padding included.
  Offset stored_entries() const noexcept { return slice_ptr.back(); }
  Offset nnz() const noexcept;
  Index source_row(Index position) const noexcept { return row_of.empty() ? position : row_of[position]; }
};

/// Bijection on [0, n). forward maps an old index to its new position,
/// inverse maps a new position back to the old index.
class Permutation {
 public:
  Permutation() = default;
  static Permutation identity(Index n);
  /// From an old -> new map; throws InvalidArgument unless it is a bijection.
  static Permutation from_forward(std::vector<Index> forward);
  /// From the list of old indices in their new order.
  static Permutation from_order(std::vector<Index> order);

  Index size() const noexcept { return static_cast<Index>(forward_.size()); }
  Index operator()(Index old_index) const noexcept { return forward_[old_index]; }
  Index old_index(Index new_index) const noexcept { return inverse_[new_index]; }
  const std::vector<Index>& forward() const noexcept { return forward_; }
  const std::vector<Index>& inverse() const noexcept { return inverse_; }

  Permutation inverted() const;
  /// i -> next(this(i)).
  Permutation then(const Permutation& next) const;
  bool is_identity() const noexcept;

  /// out[p(i)] = in[i].
  std::vector<double> apply(std::span<const double> in) const;
  /// out[i] = in[p(i)].
  std::vector<double> unapply(std::span<const double> in) const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<Index> forward_;
  std::vector<Index> inverse_;
};

struct LinearSystem {
  CsrMatrix a;
  std::vector<double> b;
};

// Ingestion

/// Parses a MatrixMarket `coordinate real|integer symmetric|general` file.
/// Symmetric input is expanded, duplicates summed, zero off-diagonals dropped.
CooMatrix read_matrix_market(const std::filesystem::path& path);
CooMatrix parse_matrix_market(std::string_view text);

/// Writes `symmetric` (lower triangle) when the matrix is numerically
/// symmetric, otherwise `general`.
void write_matrix_market(const CsrMatrix& m, const std::filesystem::path& path);

/// Sorts, merges duplicates and inserts an explicit 0 for every missing
/// diagonal. The number of inserted diagonals is written to `inserted`.
CsrMatrix coo_to_csr(const CooMatrix& m, Index* inserted_diagonals = nullptr);

/// Binary CSR cache, see docs/formats.md.
void write_csr_cache(const CsrMatrix& m, const std::filesystem::path& path);
CsrMatrix read_csr_cache(const std::filesystem::path& path);
bool is_csr_cache(const std::filesystem::path& path);

// Conversion and algebra

SellMatrix csr_to_sell(const CsrMatrix& m, Index slice_width, const Permutation* row_order = nullptr);
/// Drops padding (entries past each row's length) and restores source order.
CsrMatrix sell_to_csr(const SellMatrix& m);

/// Ā = P A Pᵀ, b̄ = P b.
LinearSystem permute_system(const CsrMatrix& a, std::span<const double> b, const Permutation& p);
CsrMatrix permute_matrix(const CsrMatrix& a, const Permutation& p);

/// A ⊕ I_k: appends k decoupled unit rows.
CsrMatrix append_identity(const CsrMatrix& a, Index k);

void spmv(const CsrMatrix& m, std::span<const double> x, std::span<double> y, ThreadPool* pool = nullptr);
void spmv(const SellMatrix& m, std::span<const double> x, std::span<double> y, ThreadPool* pool = nullptr);
std::vector<double> spmv(const CsrMatrix& m, std::span<const double> x);
std::vector<double> spmv(const SellMatrix& m, std::span<const double> x);

// Generators

/// Five-point stencil on an nx-by-ny grid, row-major node numbering,
/// 4 on the diagonal and -1 to each grid neighbour; b is all ones.
LinearSystem gen_laplacian_5pt(Index nx, Index ny);

/// Symmetric, strictly diagonally dominant M-matrix with roughly
/// `density * n` off-diagonals per row. Deterministic for a given seed.
CsrMatrix gen_random_spd(Index n, double density, std::uint64_t seed);

CsrMatrix gen_identity(Index n);

/// Dense row-major copy. Test and small-problem use only.
std::vector<double> to_dense(const CsrMatrix& m);

}  // namespace trilab
