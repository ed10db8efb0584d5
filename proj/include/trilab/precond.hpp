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

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "trilab/ordering.hpp"
#include "trilab/sparse.hpp"
#include "trilab/thread_pool.hpp"

namespace trilab {

/// IC(0) factor A' ≈ L Lᵀ. The diagonal of L is kept apart from its strictly
/// lower part; `upper` is the transpose of `lower`, stored by rows so the
/// backward sweep reads it the same way the forward sweep reads `lower`.
struct IcFactor {
  Index n = 0;
  CsrMatrix lower;
  CsrMatrix upper;
  std::vector<double> diag;
  std::vector<double> inv_diag;
  double shift = 0.0;
  OrderingKind tag = OrderingKind::natural;
};

/// HBMC factor in SELL form. Slice s holds level-2 step s % b_s of level-1
/// block s / b_s, so slice width equals w and slices line up with steps.
struct SellFactor {
  Index n = 0;
  Index block_size = 1;
  Index width = 1;
  std::vector<Index> level1_ptr;  // level-1 block span per color
  SellMatrix lower;
  SellMatrix upper;
  std::vector<double> inv_diag;
};

/// Barriers completed during the last kernel invocation.
struct BarrierCounter {
  std::size_t count = 0;
};

/// Right-looking IC(0) with overwriting on the lower pattern of
/// A' = A with its diagonal scaled by (1 + shift). Throws BreakdownError on
/// the first pivot <= 0.
IcFactor ic0_factorize(const CsrMatrix& a, double shift = 0.0, OrderingKind tag = OrderingKind::natural);

/// max |(L Lᵀ)_ij - A'_ij| / sqrt(A'_ii A'_jj) over the lower pattern of A'.
double ic0_residual_on_pattern(const CsrMatrix& a, const IcFactor& f);

/// True when pattern(lower) equals the strictly lower pattern of a.
bool ic0_pattern_matches(const CsrMatrix& a, const IcFactor& f);

struct EquivalenceResult {
  bool equivalent = false;
  double max_deviation = 0.0;
};

/// Compares P L(A) Pᵀ with L(P A Pᵀ) entrywise over the union of patterns.
EquivalenceResult factor_equivalence_check(const CsrMatrix& a, const Permutation& p, double shift = 0.0,
                                           double tolerance = 1e-12);

SellFactor build_sell_factor(const IcFactor& f, const HbmcLayout& layout);

// Substitution kernels. Outputs are fully overwritten. Parallel kernels
// visit row entries in the same order as the sequential ones, so their
// results agree bit for bit with it.

void sub_forward_seq(const IcFactor& f, std::span<const double> r, std::span<double> y);
void sub_backward_seq(const IcFactor& f, std::span<const double> y, std::span<double> z);

void sub_forward_mc(const IcFactor& f, const NodalColoring& layout, std::span<const double> r, std::span<double> y,
                    ThreadPool& pool, BarrierCounter* barriers = nullptr);
void sub_backward_mc(const IcFactor& f, const NodalColoring& layout, std::span<const double> y, std::span<double> z,
                     ThreadPool& pool, BarrierCounter* barriers = nullptr);

void sub_forward_bmc(const IcFactor& f, const BmcLayout& layout, std::span<const double> r, std::span<double> y,
                     ThreadPool& pool, BarrierCounter* barriers = nullptr);
void sub_backward_bmc(const IcFactor& f, const BmcLayout& layout, std::span<const double> y, std::span<double> z,
                      ThreadPool& pool, BarrierCounter* barriers = nullptr);

void sub_forward_hbmc(const SellFactor& f, const HbmcLayout& layout, std::span<const double> r, std::span<double> y,
                      ThreadPool& pool, BarrierCounter* barriers = nullptr);
void sub_backward_hbmc(const SellFactor& f, const HbmcLayout& layout, std::span<const double> y, std::span<double> z,
                       ThreadPool& pool, BarrierCounter* barriers = nullptr);

/// Name of the level-2 step implementation picked at run time for width w
/// ("avx512", "avx2" or "scalar").
const char* hbmc_kernel_isa(Index width) noexcept;

/// Doubles per hardware vector register: 8 with AVX-512, 4 with AVX2, else 2.
Index host_simd_width() noexcept;

/// Factor plus the layout its kernels run on. Layout pointers are shared so
/// the object can be copied and moved freely.
struct IcPreconditioner {
  OrderingKind kind = OrderingKind::natural;
  IcFactor factor;
  std::shared_ptr<const NodalColoring> mc;
  std::shared_ptr<const BmcLayout> bmc;
  std::shared_ptr<const HbmcLayout> hbmc;
  std::optional<SellFactor> sell;

  Index size() const noexcept { return factor.n; }
};

/// z = (L Lᵀ)⁻¹ r with the kernel pair matching p.kind. `scratch` must hold
/// size() values. Adds the barriers of both sweeps to *barrier_total.
void apply_ic_preconditioner(const IcPreconditioner& p, std::span<const double> r, std::span<double> z,
                             std::span<double> scratch, ThreadPool& pool, std::size_t* barrier_total = nullptr);

}  // namespace trilab
