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

#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "trilab/sparse.hpp"

namespace trilab {

/// Proper node coloring. perm groups nodes by ascending color, ascending
/// index inside a color; color_ptr[c] is the first position of color c.
struct NodalColoring {
  Index n_colors = 0;
  std::vector<Index> color_of;
  Permutation perm;
  std::vector<Index> color_ptr;

  Index size() const noexcept { return static_cast<Index>(color_of.size()); }
};

/// Partition of [0, n) into blocks of at most block_size members, each
/// block's members ascending.
struct Blocking {
  Index block_size = 1;
  std::vector<Index> block_of;
  std::vector<Index> member_ptr{0};
  std::vector<Index> members;

  Index n_blocks() const noexcept { return static_cast<Index>(member_ptr.size()) - 1; }
  std::span<const Index> block(Index k) const noexcept {
    return {members.data() + member_ptr[k], static_cast<std::size_t>(member_ptr[k + 1] - member_ptr[k])};
  }
};

/// Block multi-color layout. Blocks of one color are contiguous in BMC order,
/// listed by ascending block id; rows inside a block keep ascending index.
struct BmcLayout {
  Blocking blocking;
  Index n_colors = 0;
  std::vector<Index> color_of_block;
  std::vector<Index> blocks_per_color;  // n(c)
  Permutation perm;                     // original -> BMC position
  std::vector<Index> color_ptr;         // BMC position span per color
  std::vector<Index> ordered_blocks;    // block ids in BMC order
  std::vector<Index> color_block_ptr;   // span of ordered_blocks per color
  std::vector<Index> block_start;       // BMC position of ordered_blocks[k]; n at the end

  Index size() const noexcept { return perm.size(); }
};

/// Hierarchical block multi-color layout on top of a BMC layout.
///
/// Index spaces: the BMC order is extended by the dummy unknowns, which get
/// ids n, n+1, ... in creation order (their own original ids too). Every
/// level-1 block occupies b_s*w consecutive HBMC positions starting at
/// k * b_s * w, and the m-th constituent BMC block's j-th member lands at
/// offset j * w + m inside it.
struct HbmcLayout {
  BmcLayout base;
  Index block_size = 1;  // b_s
  Index width = 1;       // w
  Index n_real = 0;
  Index n_padded = 0;
  Index dummy_blocks = 0;    // whole dummy blocks added to reach a multiple of w
  Index dummy_unknowns = 0;  // all dummy rows, including fill of short blocks
  std::vector<Index> level1_per_color;  // n̄(c)
  std::vector<Index> level1_ptr;        // level-1 block id span per color
  std::vector<Index> level1_color;      // color of each level-1 block
  /// BMC block id occupying slot m of level-1 block k at [k*w + m]; -1 = dummy.
  std::vector<Index> slot_block;
  Permutation perm;           // extended BMC -> HBMC
  Permutation composed_perm;  // extended original -> HBMC
  std::vector<unsigned char> is_dummy;  // per HBMC position

  Index level1_count() const noexcept { return static_cast<Index>(level1_color.size()); }
  Index level1_span() const noexcept { return block_size * width; }
  Index level1_of_position(Index pos) const noexcept { return pos / level1_span(); }
};

/// Per-color slot plan produced before the HBMC permutation is built.
struct ColorPadding {
  /// For each color, the BMC block ids in slot order followed by -1 entries
  /// for dummy blocks; length is a multiple of w.
  std::vector<std::vector<Index>> slots;
  Index dummy_blocks = 0;
  Index dummy_unknowns = 0;
};

/// Directed ordering graph over original ids; edges sorted, one per pair.
struct OrderingGraph {
  Index n = 0;
  std::vector<std::pair<Index, Index>> edges;  // (earlier, later)

  friend bool operator==(const OrderingGraph&, const OrderingGraph&) = default;
};

struct ErReport {
  bool holds = true;
  std::size_t pairs_checked = 0;
  std::size_t violation_count = 0;
  std::vector<std::pair<Index, Index>> violations;  // first few, (i1, i2) with i1 < i2
};

struct StructureReport {
  bool level2_diagonal = true;
  bool level1_independent = true;
  std::size_t level2_offenders = 0;
  std::size_t level1_offenders = 0;
};

NodalColoring greedy_color_nodes(const CsrMatrix& a);
Blocking build_blocks(const CsrMatrix& a, Index block_size);
BmcLayout color_blocks(const CsrMatrix& a, Blocking blocking);
BmcLayout build_bmc(const CsrMatrix& a, Index block_size);

ColorPadding pad_colors(const BmcLayout& layout, Index width);
HbmcLayout build_hbmc(const BmcLayout& layout, Index width);

OrderingGraph build_ordering_graph(const CsrMatrix& a, const Permutation& p);

/// sgn(i1 - i2) == sgn(p(i1) - p(i2)) for every structurally coupled pair.
ErReport check_er_condition(const CsrMatrix& a, const Permutation& p, std::size_t max_reported = 16);
/// Same scan restricted to pairs accepted by `keep`.
ErReport check_er_condition_if(const CsrMatrix& a, const Permutation& p,
                               const std::function<bool(Index, Index)>& keep, std::size_t max_reported = 16);

/// True if no stored off-diagonal joins two nodes of equal color.
bool is_proper_coloring(const CsrMatrix& a, std::span<const Index> color_of);
/// True if no stored entry couples two distinct blocks of equal color.
bool is_proper_block_coloring(const CsrMatrix& a, const BmcLayout& layout);

/// Pattern scan of an HBMC-ordered (padded) matrix: every w×w level-2
/// diagonal block must be diagonal and distinct level-1 blocks of one color
/// must be uncoupled.
StructureReport scan_hbmc_structure(const CsrMatrix& hbmc_matrix, const HbmcLayout& layout);

/// Extended BMC-ordered matrix A_bmc ⊕ I (the "A" of the secondary reordering).
CsrMatrix bmc_extended_matrix(const CsrMatrix& a, const HbmcLayout& layout);
/// P (A ⊕ I) Pᵀ with P the composed HBMC permutation; b gets zeros on dummies.
LinearSystem hbmc_system(const CsrMatrix& a, std::span<const double> b, const HbmcLayout& layout);

/// Layout dump: one line per real node "orig color block level1 position".
void write_layout(std::ostream& out, const NodalColoring& layout);
void write_layout(std::ostream& out, const BmcLayout& layout);
void write_layout(std::ostream& out, const HbmcLayout& layout);

}  // namespace trilab
