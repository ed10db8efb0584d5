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

#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <utility>

namespace oracle {

Dense dense(const CsrMatrix& a) {
  Dense d(a.n);
  for (Index i = 0; i < a.n; ++i) {
    for (auto k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) d(i, a.col_idx[k]) += a.values[k];
  }
  return d;
}

CsrMatrix sparse(const Dense& a) {
  CsrMatrix m;
  m.n = a.n;
  m.row_ptr.assign(static_cast<std::size_t>(a.n) + 1, 0);
  m.diag_ptr.resize(a.n);
  for (Index i = 0; i < a.n; ++i) {
    for (Index j = 0; j < a.n; ++j) {
      if (a(i, j) == 0.0 && i != j) continue;
      if (i == j) m.diag_ptr[i] = static_cast<trilab::Offset>(m.col_idx.size());
      m.col_idx.push_back(j);
      m.values.push_back(a(i, j));
    }
    m.row_ptr[i + 1] = static_cast<trilab::Offset>(m.col_idx.size());
  }
  return m;
}

Dense ic0(const CsrMatrix& a, double shift) {
  const Dense ad = dense(a);
  std::vector<char> kept(static_cast<std::size_t>(a.n) * a.n, 0);
  for (Index i = 0; i < a.n; ++i) {
    for (Index j : a.cols(i)) kept[static_cast<std::size_t>(i) * a.n + j] = 1;
  }
  Dense l(a.n);
  for (Index i = 0; i < a.n; ++i) {
    for (Index j = 0; j <= i; ++j) {
      if (!kept[static_cast<std::size_t>(i) * a.n + j]) continue;
      double s = i == j ? ad(i, i) * (1.0 + shift) : ad(i, j);
      for (Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = i == j ? std::sqrt(s) : s / l(j, j);
    }
  }
  return l;
}

bool cholesky(const Dense& a, Dense& l) {
  l = Dense(a.n);
  for (Index j = 0; j < a.n; ++j) {
    double s = a(j, j);
    for (Index k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
    if (!(s > 0.0)) return false;
    l(j, j) = std::sqrt(s);
    for (Index i = j + 1; i < a.n; ++i) {
      double t = a(i, j);
      for (Index k = 0; k < j; ++k) t -= l(i, k) * l(j, k);
      l(i, j) = t / l(j, j);
    }
  }
  return true;
}

std::vector<double> lower_solve(const Dense& l, std::span<const double> r) {
  std::vector<double> y(l.n);
  for (Index i = 0; i < l.n; ++i) {
    double s = r[i];
    for (Index j = 0; j < i; ++j) s -= l(i, j) * y[j];
    y[i] = s / l(i, i);
  }
  return y;
}

std::vector<double> upper_solve_transposed(const Dense& l, std::span<const double> y) {
  std::vector<double> z(l.n);
  for (Index i = l.n - 1; i >= 0; --i) {
    double s = y[i];
    for (Index j = i + 1; j < l.n; ++j) s -= l(j, i) * z[j];
    z[i] = s / l(i, i);
  }
  return z;
}

std::vector<double> solve(Dense a, std::vector<double> b) {
  const Index n = a.n;
  for (Index c = 0; c < n; ++c) {
    Index p = c;
    for (Index r = c + 1; r < n; ++r) {
      if (std::abs(a(r, c)) > std::abs(a(p, c))) p = r;
    }
    if (p != c) {
      for (Index k = 0; k < n; ++k) std::swap(a(c, k), a(p, k));
      std::swap(b[c], b[p]);
    }
    for (Index r = c + 1; r < n; ++r) {
      const double f = a(r, c) / a(c, c);
      if (f == 0.0) continue;
      for (Index k = c; k < n; ++k) a(r, k) -= f * a(c, k);
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (Index i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (Index k = i + 1; k < n; ++k) s -= a(i, k) * x[k];
    x[i] = s / a(i, i);
  }
  return x;
}

std::vector<double> multiply(const Dense& a, std::span<const double> x) {
  std::vector<double> y(a.n, 0.0);
  for (Index i = 0; i < a.n; ++i) {
    for (Index j = 0; j < a.n; ++j) y[i] += a(i, j) * x[j];
  }
  return y;
}

Dense laplacian(Index nx, Index ny) {
  Dense d(nx * ny);
  for (Index y = 0; y < ny; ++y) {
    for (Index x = 0; x < nx; ++x) {
      const Index i = y * nx + x;
      d(i, i) = 4.0;
      if (x > 0) d(i, i - 1) = -1.0;
      if (x + 1 < nx) d(i, i + 1) = -1.0;
      if (y > 0) d(i, i - nx) = -1.0;
      if (y + 1 < ny) d(i, i + nx) = -1.0;
    }
  }
  return d;
}

std::vector<double> random_vector(Index n, std::uint64_t seed, double lo, double hi) {
  std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

double max_rel(std::span<const double> u, std::span<const double> v) {
  double worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double s = std::max(std::abs(u[i]), std::abs(v[i]));
    if (s > 0.0) worst = std::max(worst, std::abs(u[i] - v[i]) / s);
  }
  return worst;
}

double rel_norm(std::span<const double> u, std::span<const double> v) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    num += (u[i] - v[i]) * (u[i] - v[i]);
    den += v[i] * v[i];
  }
  return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

CsrMatrix random_spd(Index n, double avg_degree, std::uint64_t seed) {
  std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
  std::uniform_int_distribution<Index> node(0, n - 1);
  std::uniform_real_distribution<double> mag(0.05, 1.0);
  const auto edges = static_cast<std::size_t>(avg_degree * n / 2.0);
  std::set<std::pair<Index, Index>> pairs;
  for (std::size_t t = 0; t < 20 * edges + 10 && pairs.size() < edges; ++t) {
    Index i = node(rng), j = node(rng);
    if (i == j) continue;
    pairs.emplace(std::min(i, j), std::max(i, j));
  }
  Dense d(n);
  for (const auto& [i, j] : pairs) {
    const double v = (rng() % 4 == 0 ? 1.0 : -1.0) * mag(rng);
    d(i, j) = v;
    d(j, i) = v;
  }
  for (Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Index j = 0; j < n; ++j) s += i == j ? 0.0 : std::abs(d(i, j));
    d(i, i) = s + 0.5 + mag(rng);
  }
  return sparse(d);
}

}  // namespace oracle
