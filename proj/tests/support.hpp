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

// Dense reference implementations used as test oracles. Nothing here calls
// the library's numerical routines.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "trilab/sparse.hpp"

namespace oracle {

using trilab::CsrMatrix;
using trilab::Index;

struct Dense {
  Index n = 0;
  std::vector<double> v;

  explicit Dense(Index size = 0) : n(size), v(static_cast<std::size_t>(size) * size, 0.0) {}
  double& operator()(Index i, Index j) { return v[static_cast<std::size_t>(i) * n + j]; }
  double operator()(Index i, Index j) const { return v[static_cast<std::size_t>(i) * n + j]; }
};

Dense dense(const CsrMatrix& a);
CsrMatrix sparse(const Dense& a);

/// Left-looking IC(0) restricted to the stored pattern of `a`, diagonal
/// scaled by (1 + shift). Returns the full lower factor including diagonal.
Dense ic0(const CsrMatrix& a, double shift);
/// Dense Cholesky; returns false if a pivot is not positive.
bool cholesky(const Dense& a, Dense& l);

std::vector<double> lower_solve(const Dense& l, std::span<const double> r);
/// Solves Lᵀ z = y.
std::vector<double> upper_solve_transposed(const Dense& l, std::span<const double> y);
/// Gaussian elimination with partial pivoting.
std::vector<double> solve(Dense a, std::vector<double> b);
std::vector<double> multiply(const Dense& a, std::span<const double> x);

/// Five-point Laplacian built directly, independent of the library generator.
Dense laplacian(Index nx, Index ny);

std::vector<double> random_vector(Index n, std::uint64_t seed, double lo = -1.0, double hi = 1.0);

/// max_i |u_i - v_i| / max(|u_i|, |v_i|).
double max_rel(std::span<const double> u, std::span<const double> v);
/// ‖u - v‖₂ / ‖v‖₂.
double rel_norm(std::span<const double> u, std::span<const double> v);

/// Random symmetric diagonally dominant matrix with a random pattern.
CsrMatrix random_spd(Index n, double avg_degree, std::uint64_t seed);

}  // namespace oracle
