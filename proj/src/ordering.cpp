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

#include "trilab/ordering.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <ostream>
#include <queue>
#include <string>

namespace trilab {

namespace {

/// Off-diagonal pattern of A + Aᵀ, neighbours ascending.
struct Adjacency {
  std::vector<Index> ptr;
  std::vector<Index> adj;

  std::span<const Index> of(Index i) const noexcept {
    return {adj.data() + ptr[i], static_cast<std::size_t>(ptr[i + 1] - ptr[i])};
  }
};

Adjacency symmetric_adjacency(const CsrMatrix& a) {
  std::vector<Index> degree(a.n, 0);
  for (Index i = 0; i < a.n; ++i) {
    for (Index j : a.cols(i)) {
      if (j == i) continue;
      ++degree[i];
      if (a.find(j, i) < 0) ++degree[j];
    }
  }
  Adjacency g;
  g.ptr.assign(static_cast<std::size_t>(a.n) + 1, 0);
  for (Index i = 0; i < a.n; ++i) g.ptr[i + 1] = g.ptr[i] + degree[i];
  g.adj.resize(g.ptr.back());
  std::vector<Index> fill(g.ptr.begin(), g.ptr.end() - 1);
  for (Index i = 0; i < a.n; ++i) {
    for (Index j : a.cols(i)) {
      if (j == i) continue;
      g.adj[fill[i]++] = j;
      if (a.find(j, i) < 0) g.adj[fill[j]++] = i;
    }
  }
  for (Index i = 0; i < a.n; ++i) std::sort(g.adj.begin() + g.ptr[i], g.adj.begin() + g.ptr[i + 1]);
  return g;
}

/// First-fit coloring visiting vertices 0..n-1.
template <typename Neighbours>
std::vector<Index> first_fit(Index n, Neighbours&& neighbours, Index& n_colors) {
  std::vector<Index> color(n, -1);
  std::vector<Index> mark;
  n_colors = 0;
  for (Index v = 0; v < n; ++v) {
    neighbours(v, [&](Index u) {
      const Index c = color[u];
      if (c >= 0) mark[c] = v;
    });
    Index c = 0;
    while (c < n_colors && mark[c] == v) ++c;
    if (c == n_colors) {
      ++n_colors;
      mark.push_back(-1);
    }
    color[v] = c;
  }
  return color;
}

}  // namespace

NodalColoring greedy_color_nodes(const CsrMatrix& a) {
  const Adjacency g = symmetric_adjacency(a);
  NodalColoring out;
  out.color_of = first_fit(a.n, [&](Index v, auto&& visit) {
    for (Index u : g.of(v)) visit(u);
  }, out.n_colors);

  out.color_ptr.assign(static_cast<std::size_t>(out.n_colors) + 1, 0);
  for (Index c : out.color_of) ++out.color_ptr[c + 1];
  std::partial_sum(out.color_ptr.begin(), out.color_ptr.end(), out.color_ptr.begin());
  std::vector<Index> next(out.color_ptr.begin(), out.color_ptr.end() - 1);
  std::vector<Index> forward(a.n);
  for (Index i = 0; i < a.n; ++i) forward[i] = next[out.color_of[i]]++;
  out.perm = Permutation::from_forward(std::move(forward));
  return out;
}

Blocking build_blocks(const CsrMatrix& a, Index block_size) {
  if (block_size < 1) throw InvalidArgument("block size must be >= 1");
  const Adjacency g = symmetric_adjacency(a);
  Blocking out;
  out.block_size = block_size;
  out.block_of.assign(a.n, -1);
  out.members.reserve(a.n);

  std::priority_queue<Index, std::vector<Index>, std::greater<>> frontier;
  Index seed = 0;
  for (;;) {
    while (seed < a.n && out.block_of[seed] != -1) ++seed;
    if (seed == a.n) break;
    const Index k = out.n_blocks();
    const auto first = static_cast<std::ptrdiff_t>(out.members.size());
    frontier = {};
    auto take = [&](Index v) {
      out.block_of[v] = k;
      out.members.push_back(v);
      for (Index u : g.of(v)) {
        if (out.block_of[u] == -1) frontier.push(u);
      }
    };
    take(seed);
    Index size = 1;
    while (size < block_size && !frontier.empty()) {
      const Index v = frontier.top();
      frontier.pop();
      if (out.block_of[v] != -1) continue;
      take(v);
      ++size;
    }
    std::sort(out.members.begin() + first, out.members.end());
    out.member_ptr.push_back(static_cast<Index>(out.members.size()));
  }
  return out;
}

BmcLayout color_blocks(const CsrMatrix& a, Blocking blocking) {
  if (static_cast<Index>(blocking.block_of.size()) != a.n) throw DimensionError("blocking does not match matrix");
  const Adjacency g = symmetric_adjacency(a);
  BmcLayout out;
  const Index nb = blocking.n_blocks();
  out.color_of_block = first_fit(nb, [&](Index k, auto&& visit) {
    for (Index v : blocking.block(k)) {
      for (Index u : g.of(v)) {
        const Index other = blocking.block_of[u];
        if (other != k) visit(other);
      }
    }
  }, out.n_colors);

  out.blocks_per_color.assign(out.n_colors, 0);
  for (Index c : out.color_of_block) ++out.blocks_per_color[c];
  out.color_block_ptr.assign(static_cast<std::size_t>(out.n_colors) + 1, 0);
  std::partial_sum(out.blocks_per_color.begin(), out.blocks_per_color.end(), out.color_block_ptr.begin() + 1);

  out.ordered_blocks.resize(nb);
  std::vector<Index> next(out.color_block_ptr.begin(), out.color_block_ptr.end() - 1);
  for (Index k = 0; k < nb; ++k) out.ordered_blocks[next[out.color_of_block[k]]++] = k;

  std::vector<Index> order;
  order.reserve(a.n);
  out.block_start.reserve(static_cast<std::size_t>(nb) + 1);
  out.color_ptr.assign(static_cast<std::size_t>(out.n_colors) + 1, 0);
  for (Index c = 0; c < out.n_colors; ++c) {
    for (Index t = out.color_block_ptr[c]; t < out.color_block_ptr[c + 1]; ++t) {
      out.block_start.push_back(static_cast<Index>(order.size()));
      const auto members = blocking.block(out.ordered_blocks[t]);
      order.insert(order.end(), members.begin(), members.end());
    }
    out.color_ptr[c + 1] = static_cast<Index>(order.size());
  }
  out.block_start.push_back(static_cast<Index>(order.size()));
  out.perm = Permutation::from_order(std::move(order));
  out.blocking = std::move(blocking);
  return out;
}

BmcLayout build_bmc(const CsrMatrix& a, Index block_size) {
  return color_blocks(a, build_blocks(a, block_size));
}

ColorPadding pad_colors(const BmcLayout& layout, Index width) {
  if (width < 1) throw InvalidArgument("SIMD width must be >= 1");
  const Index bs = layout.blocking.block_size;
  ColorPadding out;
  out.slots.resize(layout.n_colors);
  for (Index c = 0; c < layout.n_colors; ++c) {
    auto& slots = out.slots[c];
    for (Index t = layout.color_block_ptr[c]; t < layout.color_block_ptr[c + 1]; ++t) {
      const Index k = layout.ordered_blocks[t];
      slots.push_back(k);
      out.dummy_unknowns += bs - static_cast<Index>(layout.blocking.block(k).size());
    }
    while (slots.size() % width != 0) {
      slots.push_back(-1);
      ++out.dummy_blocks;
      out.dummy_unknowns += bs;
    }
  }
  return out;
}

HbmcLayout build_hbmc(const BmcLayout& layout, Index width) {
  ColorPadding padding = pad_colors(layout, width);
  HbmcLayout out;
  out.block_size = layout.blocking.block_size;
  out.width = width;
  out.n_real = layout.size();
  out.dummy_blocks = padding.dummy_blocks;
  out.dummy_unknowns = padding.dummy_unknowns;
  out.n_padded = out.n_real + out.dummy_unknowns;
  out.is_dummy.assign(out.n_padded, 0);

  const Index bs = out.block_size;
  std::vector<Index> hbmc_of_bmc(out.n_padded, -1);
  Index next_dummy = out.n_real;
  Index base = 0;
  out.level1_ptr.push_back(0);
  for (Index c = 0; c < layout.n_colors; ++c) {
    const auto& slots = padding.slots[c];
    const auto nbar = static_cast<Index>(slots.size()) / width;
    out.level1_per_color.push_back(nbar);
    for (Index kb = 0; kb < nbar; ++kb) {
      out.level1_color.push_back(c);
      for (Index m = 0; m < width; ++m) {
        const Index blk = slots[static_cast<std::size_t>(kb) * width + m];
        out.slot_block.push_back(blk);
        const auto members = blk >= 0 ? layout.blocking.block(blk) : std::span<const Index>{};
        for (Index j = 0; j < bs; ++j) {
          const Index pos = base + j * width + m;
          if (j < static_cast<Index>(members.size())) {
            hbmc_of_bmc[layout.perm(members[j])] = pos;
          } else {
            hbmc_of_bmc[next_dummy++] = pos;
            out.is_dummy[pos] = 1;
          }
        }
      }
      base += bs * width;
    }
    out.level1_ptr.push_back(static_cast<Index>(out.level1_color.size()));
  }

  std::vector<Index> composed(out.n_padded);
  for (Index i = 0; i < out.n_real; ++i) composed[i] = hbmc_of_bmc[layout.perm(i)];
  for (Index d = out.n_real; d < out.n_padded; ++d) composed[d] = hbmc_of_bmc[d];
  out.perm = Permutation::from_forward(std::move(hbmc_of_bmc));
  out.composed_perm = Permutation::from_forward(std::move(composed));
  out.base = layout;
  return out;
}

OrderingGraph build_ordering_graph(const CsrMatrix& a, const Permutation& p) {
  if (p.size() != a.n) throw DimensionError("permutation size does not match matrix");
  const Adjacency g = symmetric_adjacency(a);
  OrderingGraph out;
  out.n = a.n;
  for (Index i = 0; i < a.n; ++i) {
    for (Index j : g.of(i)) {
      if (j <= i) continue;
      out.edges.push_back(p(i) < p(j) ? std::pair{i, j} : std::pair{j, i});
    }
  }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

ErReport check_er_condition_if(const CsrMatrix& a, const Permutation& p,
                               const std::function<bool(Index, Index)>& keep, std::size_t max_reported) {
  if (p.size() != a.n) throw DimensionError("permutation size does not match matrix");
  const Adjacency g = symmetric_adjacency(a);
  ErReport r;
  for (Index i = 0; i < a.n; ++i) {
    for (Index j : g.of(i)) {
      if (j <= i) continue;
      if (keep && !keep(i, j)) continue;
      ++r.pairs_checked;
      // i < j, so the sign is preserved iff p(i) < p(j).
      if (p(i) > p(j)) {
        r.holds = false;
        ++r.violation_count;
        if (r.violations.size() < max_reported) r.violations.emplace_back(i, j);
      }
    }
  }
  return r;
}

ErReport check_er_condition(const CsrMatrix& a, const Permutation& p, std::size_t max_reported) {
  return check_er_condition_if(a, p, nullptr, max_reported);
}

bool is_proper_coloring(const CsrMatrix& a, std::span<const Index> color_of) {
  for (Index i = 0; i < a.n; ++i) {
    for (Index j : a.cols(i)) {
      if (j != i && color_of[i] == color_of[j]) return false;
    }
  }
  return true;
}

bool is_proper_block_coloring(const CsrMatrix& a, const BmcLayout& layout) {
  const auto& block_of = layout.blocking.block_of;
  for (Index i = 0; i < a.n; ++i) {
    for (Index j : a.cols(i)) {
      const Index bi = block_of[i], bj = block_of[j];
      if (bi != bj && layout.color_of_block[bi] == layout.color_of_block[bj]) return false;
    }
  }
  return true;
}

StructureReport scan_hbmc_structure(const CsrMatrix& m, const HbmcLayout& layout) {
  if (m.n != layout.n_padded) throw DimensionError("matrix is not in the padded HBMC index space");
  StructureReport r;
  const Index span = layout.level1_span();
  const Index w = layout.width;
  for (Index i = 0; i < m.n; ++i) {
    for (Index j : m.cols(i)) {
      if (j == i) continue;
      const Index ki = i / span, kj = j / span;
      if (ki == kj) {
        if (i / w == j / w) {
          r.level2_diagonal = false;
          ++r.level2_offenders;
        }
      } else if (layout.level1_color[ki] == layout.level1_color[kj]) {
        r.level1_independent = false;
        ++r.level1_offenders;
      }
    }
  }
  return r;
}

CsrMatrix bmc_extended_matrix(const CsrMatrix& a, const HbmcLayout& layout) {
  return append_identity(permute_matrix(a, layout.base.perm), layout.dummy_unknowns);
}

LinearSystem hbmc_system(const CsrMatrix& a, std::span<const double> b, const HbmcLayout& layout) {
  if (b.size() != static_cast<std::size_t>(a.n)) throw DimensionError("right-hand side length does not match matrix");
  std::vector<double> b_ext(b.begin(), b.end());
  b_ext.resize(layout.n_padded, 0.0);
  return permute_system(append_identity(a, layout.dummy_unknowns), b_ext, layout.composed_perm);
}

void write_layout(std::ostream& out, const NodalColoring& layout) {
  out << "# tri-lab layout v1\n# ordering mc\n# n " << layout.size() << "\n# colors " << layout.n_colors
      << "\n# columns: original color block level1 position\n";
  for (Index i = 0; i < layout.size(); ++i)
    out << i << ' ' << layout.color_of[i] << " -1 -1 " << layout.perm(i) << '\n';
}

void write_layout(std::ostream& out, const BmcLayout& layout) {
  out << "# tri-lab layout v1\n# ordering bmc\n# n " << layout.size() << "\n# colors " << layout.n_colors
      << "\n# block_size " << layout.blocking.block_size << "\n# columns: original color block level1 position\n";
  for (Index i = 0; i < layout.size(); ++i) {
    const Index b = layout.blocking.block_of[i];
    out << i << ' ' << layout.color_of_block[b] << ' ' << b << " -1 " << layout.perm(i) << '\n';
  }
}

void write_layout(std::ostream& out, const HbmcLayout& layout) {
  const auto& bmc = layout.base;
  out << "# tri-lab layout v1\n# ordering hbmc\n# n " << layout.n_real << "\n# colors " << bmc.n_colors
      << "\n# block_size " << layout.block_size << "\n# width " << layout.width << "\n# padded "
      << layout.n_padded << "\n# dummies " << layout.dummy_unknowns
      << "\n# columns: original color block level1 position\n";
  for (Index i = 0; i < layout.n_real; ++i) {
    const Index b = bmc.blocking.block_of[i];
    const Index pos = layout.composed_perm(i);
    out << i << ' ' << bmc.color_of_block[b] << ' ' << b << ' ' << layout.level1_of_position(pos) << ' ' << pos << '\n';
  }
}

}  // namespace trilab
