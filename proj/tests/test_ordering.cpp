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

#include <catch_amalgamated.hpp>

#include <random>
#include <set>
#include <sstream>

#include "support.hpp"
#include "trilab/ordering.hpp"

using namespace trilab;

namespace {

CsrMatrix from_edges(Index n, const std::vector<std::pair<Index, Index>>& edges) {
  oracle::Dense d(n);
  for (Index i = 0; i < n; ++i) d(i, i) = 4.0;
  for (auto [i, j] : edges) {
    d(i, j) = -1.0;
    d(j, i) = -1.0;
  }
  return oracle::sparse(d);
}

/// Independent edge scan: no stored entry joins two nodes of equal color.
bool coloring_is_proper(const CsrMatrix& a, const std::vector<Index>& color) {
  const auto d = oracle::dense(a);
  for (Index i = 0; i < a.n; ++i) {
    for (Index j = 0; j < a.n; ++j) {
      if (i != j && d(i, j) != 0.0 && color[i] == color[j]) return false;
    }
  }
  return true;
}

std::vector<CsrMatrix> sample_matrices() {
  std::vector<CsrMatrix> out;
  out.push_back(gen_laplacian_5pt(4, 4).a);
  out.push_back(gen_laplacian_5pt(9, 7).a);
  out.push_back(gen_laplacian_5pt(16, 16).a);
  for (std::uint64_t s = 0; s < 6; ++s) out.push_back(oracle::random_spd(90 + 13 * static_cast<Index>(s), 5.0, s));
  out.push_back(gen_identity(10));
  return out;
}

}  // namespace

TEST_CASE("greedy nodal coloring is proper and groups colors") {
  for (const auto& a : sample_matrices()) {
    const NodalColoring c = greedy_color_nodes(a);
    CHECK(coloring_is_proper(a, c.color_of));
    CHECK(is_proper_coloring(a, c.color_of));
    for (Index i = 0; i < a.n; ++i) {
      CHECK(c.perm(i) >= c.color_ptr[c.color_of[i]]);
      CHECK(c.perm(i) < c.color_ptr[c.color_of[i] + 1]);
      if (i > 0 && c.color_of[i - 1] == c.color_of[i]) CHECK(c.perm(i - 1) < c.perm(i));
    }
  }
}

TEST_CASE("five-point grids are red-black colored") {
  const NodalColoring c = greedy_color_nodes(gen_laplacian_5pt(8, 6).a);
  CHECK(c.n_colors == 2);
  for (Index i = 0; i < 48; ++i) CHECK(c.color_of[i] == ((i % 8) + (i / 8)) % 2);
}

TEST_CASE("diagonal matrix needs one color") {
  CHECK(greedy_color_nodes(gen_identity(7)).n_colors == 1);
}

TEST_CASE("block growth follows the smallest-index rule") {
  SECTION("path graph with b_s=2") {
    const Blocking b = build_blocks(from_edges(4, {{0, 1}, {1, 2}, {2, 3}}), 2);
    REQUIRE(b.n_blocks() == 2);
    CHECK(std::vector<Index>(b.block(0).begin(), b.block(0).end()) == std::vector<Index>{0, 1});
    CHECK(std::vector<Index>(b.block(1).begin(), b.block(1).end()) == std::vector<Index>{2, 3});
  }
  SECTION("b_s=1 gives singletons") {
    const Blocking b = build_blocks(gen_laplacian_5pt(3, 3).a, 1);
    CHECK(b.n_blocks() == 9);
  }
  SECTION("4x4 grid with b_s=4 gives full grid rows") {
    const Blocking b = build_blocks(gen_laplacian_5pt(4, 4).a, 4);
    REQUIRE(b.n_blocks() == 4);
    for (Index k = 0; k < 4; ++k) {
      CHECK(b.block(k).size() == 4);
      for (Index t = 0; t < 4; ++t) CHECK(b.block(k)[t] == 4 * k + t);
    }
  }
  SECTION("disconnected nodes end up in short blocks") {
    const Blocking b = build_blocks(gen_identity(5), 3);
    CHECK(b.n_blocks() == 5);
  }
  CHECK_THROWS_AS(build_blocks(gen_identity(3), 0), InvalidArgument);
}

TEST_CASE("blockings partition the nodes") {
  for (const auto& a : sample_matrices()) {
    for (Index bs : {1, 3, 4, 8, 16}) {
      const Blocking b = build_blocks(a, bs);
      std::vector<int> seen(a.n, 0);
      for (Index k = 0; k < b.n_blocks(); ++k) {
        const auto m = b.block(k);
        CHECK(!m.empty());
        CHECK(static_cast<Index>(m.size()) <= bs);
        CHECK(std::is_sorted(m.begin(), m.end()));
        for (Index v : m) {
          ++seen[v];
          CHECK(b.block_of[v] == k);
        }
      }
      CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
    }
  }
}

TEST_CASE("BMC on the 4x4 grid with b_s=4 uses two colors") {
  const BmcLayout l = build_bmc(gen_laplacian_5pt(4, 4).a, 4);
  CHECK(l.n_colors == 2);
  CHECK(l.blocks_per_color == std::vector<Index>{2, 2});
  // Rows 0 and 2 come first, then rows 1 and 3.
  const std::vector<Index> order{0, 1, 2, 3, 8, 9, 10, 11, 4, 5, 6, 7, 12, 13, 14, 15};
  for (Index k = 0; k < 16; ++k) CHECK(l.perm.old_index(k) == order[k]);
}

TEST_CASE("BMC with singleton blocks equals nodal coloring") {
  for (const auto& a : sample_matrices()) {
    const BmcLayout l = build_bmc(a, 1);
    const NodalColoring c = greedy_color_nodes(a);
    CHECK(l.n_colors == c.n_colors);
    CHECK(l.perm == c.perm);
  }
}

TEST_CASE("BMC block coloring is proper and contiguous") {
  for (const auto& a : sample_matrices()) {
    for (Index bs : {2, 4, 8}) {
      const BmcLayout l = build_bmc(a, bs);
      CHECK(is_proper_block_coloring(a, l));
      const auto d = oracle::dense(a);
      for (Index i = 0; i < a.n; ++i) {
        for (Index j = 0; j < a.n; ++j) {
          const Index bi = l.blocking.block_of[i], bj = l.blocking.block_of[j];
          if (d(i, j) != 0.0 && bi != bj) CHECK(l.color_of_block[bi] != l.color_of_block[bj]);
        }
      }
      for (Index t = 0; t + 1 < static_cast<Index>(l.ordered_blocks.size()); ++t) {
        const Index k = l.ordered_blocks[t];
        const auto m = l.blocking.block(k);
        for (std::size_t s = 0; s < m.size(); ++s) CHECK(l.perm(m[s]) == l.block_start[t] + static_cast<Index>(s));
      }
    }
  }
}

TEST_CASE("secondary reordering interleaves one level-1 block") {
  // Four uncoupled pairs: one color, four blocks of two.
  const CsrMatrix a = from_edges(8, {{0, 1}, {2, 3}, {4, 5}, {6, 7}});
  const BmcLayout bmc = build_bmc(a, 2);
  REQUIRE(bmc.n_colors == 1);
  const HbmcLayout h = build_hbmc(bmc, 4);
  CHECK(h.dummy_unknowns == 0);
  CHECK(h.level1_count() == 1);
  const std::vector<Index> expected{0, 4, 1, 5, 2, 6, 3, 7};
  for (Index k = 0; k < 8; ++k) CHECK(h.perm(k) == expected[k]);
  CHECK(h.perm(1) == 4);
  CHECK(h.perm(2) == 1);
}

TEST_CASE("colors are padded to a multiple of w with dummy blocks") {
  // Five uncoupled full blocks in one color.
  const CsrMatrix a = from_edges(10, {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {8, 9}});
  const BmcLayout bmc = build_bmc(a, 2);
  const ColorPadding pad = pad_colors(bmc, 4);
  CHECK(pad.dummy_blocks == 3);
  CHECK(pad.dummy_unknowns == 6);
  const HbmcLayout h = build_hbmc(bmc, 4);
  CHECK(h.level1_per_color == std::vector<Index>{2});
  CHECK(h.n_padded == 16);
  CHECK(std::count(h.is_dummy.begin(), h.is_dummy.end(), 1) == 6);
}

TEST_CASE("short blocks are filled with dummy unknowns") {
  const CsrMatrix a = gen_laplacian_5pt(3, 3).a;
  const BmcLayout bmc = build_bmc(a, 4);
  const HbmcLayout h = build_hbmc(bmc, 2);
  Index shortfall = 0;
  for (Index k = 0; k < bmc.blocking.n_blocks(); ++k) shortfall += 4 - static_cast<Index>(bmc.blocking.block(k).size());
  CHECK(h.dummy_unknowns == shortfall + 4 * h.dummy_blocks);
  CHECK(h.n_padded == h.level1_count() * 4 * 2);
  for (Index pos = 0; pos < h.n_padded; ++pos) {
    const Index old = h.composed_perm.old_index(pos);
    CHECK((old >= h.n_real) == (h.is_dummy[pos] == 1));
  }
}

TEST_CASE("w=1 keeps the BMC order when every block is full") {
  const CsrMatrix a = gen_laplacian_5pt(8, 8).a;
  const BmcLayout bmc = build_bmc(a, 4);
  const HbmcLayout h = build_hbmc(bmc, 1);
  CHECK(h.dummy_unknowns == 0);
  CHECK(h.perm.is_identity());
  CHECK(h.composed_perm == bmc.perm);
}

TEST_CASE("HBMC on the 4x4 grid has diagonal 4x4 level-2 blocks") {
  const CsrMatrix a = gen_laplacian_5pt(4, 4).a;
  const HbmcLayout h = build_hbmc(build_bmc(a, 4), 4);
  CHECK(h.base.n_colors == 2);
  const CsrMatrix m = permute_matrix(bmc_extended_matrix(a, h), h.perm);
  const auto d = oracle::dense(m);
  for (Index s = 0; s < m.n / 4; ++s) {
    for (Index r = 0; r < 4; ++r) {
      for (Index c = 0; c < 4; ++c) {
        if (r != c) CHECK(d(4 * s + r, 4 * s + c) == 0.0);
      }
    }
  }
  const StructureReport st = scan_hbmc_structure(m, h);
  CHECK(st.level2_diagonal);
  CHECK(st.level1_independent);
}

TEST_CASE("HBMC secondary permutations satisfy the ER condition") {
  for (const auto& a : sample_matrices()) {
    for (Index bs : {1, 2, 4, 8}) {
      const BmcLayout bmc = build_bmc(a, bs);
      for (Index w : {1, 2, 4, 8}) {
        const HbmcLayout h = build_hbmc(bmc, w);
        const CsrMatrix ext = bmc_extended_matrix(a, h);
        const ErReport er = check_er_condition(ext, h.perm);
        CHECK(er.holds);
        CHECK(er.violation_count == 0);
        // Orienting edges by either order gives the same ordering graph.
        CHECK(build_ordering_graph(ext, Permutation::identity(ext.n)) == build_ordering_graph(ext, h.perm));

        const Index span = h.level1_span();
        auto level1_of_ext = [&](Index i) { return h.perm(i) / span; };
        const auto cross = check_er_condition_if(
            ext, h.perm, [&](Index i, Index j) { return level1_of_ext(i) != level1_of_ext(j); });
        CHECK(cross.holds);
        auto block_of_ext = [&](Index i) { return i < h.n_real ? bmc.blocking.block_of[bmc.perm.old_index(i)] : -1 - i; };
        const auto inner =
            check_er_condition_if(ext, h.perm, [&](Index i, Index j) { return block_of_ext(i) == block_of_ext(j); });
        CHECK(inner.holds);

        const StructureReport st = scan_hbmc_structure(permute_matrix(ext, h.perm), h);
        CHECK(st.level2_diagonal);
        CHECK(st.level1_independent);
      }
    }
  }
}

TEST_CASE("ER check detects a reversed coupled pair") {
  const CsrMatrix a = gen_laplacian_5pt(4, 4).a;
  std::vector<Index> f(16);
  std::iota(f.begin(), f.end(), 0);
  std::swap(f[0], f[1]);
  const ErReport er = check_er_condition(a, Permutation::from_forward(f));
  CHECK_FALSE(er.holds);
  CHECK(er.violation_count == 1);
  REQUIRE(er.violations.size() == 1);
  CHECK(er.violations[0] == std::pair<Index, Index>{0, 1});
  CHECK_FALSE(build_ordering_graph(a, Permutation::identity(16)) == build_ordering_graph(a, Permutation::from_forward(f)));
}

TEST_CASE("layout dump has one line per real node") {
  const CsrMatrix a = gen_laplacian_5pt(5, 3).a;
  const HbmcLayout h = build_hbmc(build_bmc(a, 4), 2);
  std::ostringstream out;
  write_layout(out, h);
  std::istringstream in(out.str());
  std::string line;
  Index rows = 0;
  std::set<Index> positions;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    Index orig, color, block, level1, pos;
    REQUIRE(fields >> orig >> color >> block >> level1 >> pos);
    CHECK(orig == rows);
    CHECK(pos == h.composed_perm(orig));
    CHECK(level1 == pos / h.level1_span());
    CHECK(color == h.level1_color[level1]);
    positions.insert(pos);
    ++rows;
  }
  CHECK(rows == a.n);
  CHECK(positions.size() == static_cast<std::size_t>(a.n));
}
