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
#include <cmath>
#include <random>
#include <set>

#include "trilab/sparse.hpp"

namespace trilab {

LinearSystem gen_laplacian_5pt(Index nx, Index ny) {
  if (nx < 1 || ny < 1) throw InvalidArgument("laplacian5pt needs nx, ny >= 1");
  CooMatrix coo;
  coo.n = nx * ny;
  coo.entries.reserve(static_cast<std::size_t>(coo.n) * 5);
  for (Index y = 0; y < ny; ++y) {
    for (Index x = 0; x < nx; ++x) {
      const Index i = y * nx + x;
      if (y > 0) coo.entries.push_back({i, i - nx, -1.0});
      if (x > 0) coo.entries.push_back({i, i - 1, -1.0});
      coo.entries.push_back({i, i, 4.0});
      if (x + 1 < nx) coo.entries.push_back({i, i + 1, -1.0});
      if (y + 1 < ny) coo.entries.push_back({i, i + nx, -1.0});
    }
  }
  return {coo_to_csr(coo), std::vector<double>(coo.n, 1.0)};
}

CsrMatrix gen_random_spd(Index n, double density, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("random SPD generator needs n >= 1");
  if (!(density >= 0.0 && density <= 1.0)) throw InvalidArgument("density must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  std::uniform_real_distribution<double> mag(0.1, 1.0);

  // Target off-diagonal count per row is density * n; draw half that many
  // undirected edges per node.
  const auto edges = static_cast<std::size_t>(std::llround(0.5 * density * n * n));
  std::set<std::pair<Index, Index>> pairs;
  std::size_t attempts = 0;
  while (pairs.size() < edges && n > 1 && attempts < 50 * edges + 100) {
    ++attempts;
    Index i = pick(rng), j = pick(rng);
    if (i == j) continue;
    if (i > j) std::swap(i, j);
    pairs.emplace(i, j);
  }

  CooMatrix coo;
  coo.n = n;
  std::vector<double> row_abs(n, 0.0);
  for (const auto& [i, j] : pairs) {
    const double v = -mag(rng);
    coo.entries.push_back({i, j, v});
    coo.entries.push_back({j, i, v});
    row_abs[i] += -v;
    row_abs[j] += -v;
  }
  for (Index i = 0; i < n; ++i) coo.entries.push_back({i, i, row_abs[i] + 1.0});
  return coo_to_csr(coo);
}

CsrMatrix gen_identity(Index n) {
  CooMatrix coo;
  coo.n = n;
  for (Index i = 0; i < n; ++i) coo.entries.push_back({i, i, 1.0});
  return coo_to_csr(coo);
}

}  // namespace trilab
