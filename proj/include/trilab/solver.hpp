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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trilab/precond.hpp"

namespace trilab {

enum class SpmvFormat { crs, sell };

std::string_view to_string(SpmvFormat f) noexcept;
SpmvFormat parse_format(std::string_view name);

struct CgConfig {
  double tol = 1e-7;
  Index max_iters = 10000;
  OrderingKind ordering = OrderingKind::hbmc;
  Index block_size = 16;
  Index width = host_simd_width();
  double shift = 0.0;
  std::size_t threads = 0;  // 0: default_thread_count()
  SpmvFormat format = SpmvFormat::crs;

  /// Throws InvalidArgument on tol <= 0, max_iters < 1, b_s < 1, w < 1 or a
  /// negative shift.
  void validate() const;
};

struct SolveReport {
  std::string matrix;
  OrderingKind ordering = OrderingKind::natural;
  Index block_size = 0;
  Index width = 0;
  Index n_colors = 0;
  Index n = 0;
  Index n_dummies = 0;
  std::size_t threads = 1;
  SpmvFormat format = SpmvFormat::crs;
  double shift = 0.0;
  double tol = 0.0;
  Index iterations = 0;
  bool converged = false;
  /// ‖r_j‖₂ / ‖b‖₂ for j = 0..iterations.
  std::vector<double> residual_history;
  std::size_t barrier_total = 0;
  double time_setup_s = 0.0;
  double time_solve_s = 0.0;
};

std::string report_to_json(const SolveReport& r, int indent = 2);
SolveReport report_from_json(std::string_view text);

/// Masked, chunked vector algebra. Reductions add per-chunk partial sums in
/// chunk order, so results do not depend on the thread count.
class VectorOps {
 public:
  static constexpr std::size_t kChunk = 2048;

  VectorOps(ThreadPool& pool, std::span<const unsigned char> skip = {}) : pool_(pool), skip_(skip) {}

  double dot(std::span<const double> u, std::span<const double> v) const;
  double norm2(std::span<const double> u) const;
  void for_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) const;

 private:
  ThreadPool& pool_;
  std::span<const unsigned char> skip_;
};

struct CgOutcome {
  Index iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;
  std::size_t barrier_total = 0;
};

/// PCG from x = 0 on an already ordered system. Rows with skip[i] != 0 are
/// left out of every inner product and norm. Throws CgBreakdown when
/// pᵀAp <= 0.
CgOutcome conjugate_gradient(const CsrMatrix& a, const SellMatrix* a_sell, std::span<const double> b,
                             std::span<double> x, const IcPreconditioner& m, std::span<const unsigned char> skip,
                             double tol, Index max_iters, ThreadPool& pool);

/// Ordering, factorization and kernel setup done once; solve() may be called
/// repeatedly with different right-hand sides.
class IccgSolver {
 public:
  IccgSolver(const CsrMatrix& a, const CgConfig& cfg);
  ~IccgSolver();
  IccgSolver(IccgSolver&&) noexcept;
  IccgSolver& operator=(IccgSolver&&) noexcept;

  /// x receives the solution in the original ordering.
  SolveReport solve(std::span<const double> b, std::span<double> x);

  const CgConfig& config() const noexcept;
  const IcPreconditioner& preconditioner() const noexcept;
  /// Coefficient matrix in solver order (padded for HBMC).
  const CsrMatrix& ordered_matrix() const noexcept;
  /// Original (extended by dummies) -> solver position.
  const Permutation& ordering() const noexcept;
  Index n_colors() const noexcept;
  Index n_dummies() const noexcept;
  double setup_seconds() const noexcept;
  ThreadPool& pool() noexcept;

 private:
  struct State;
  std::unique_ptr<State> s_;
};

SolveReport pcg(const CsrMatrix& a, std::span<const double> b, const CgConfig& cfg, std::vector<double>& x);

struct ConvergenceComparison {
  Index iters_a = 0;
  Index iters_b = 0;
  /// Max over the common history prefix of |a_j - b_j| / max(a_j, b_j).
  double max_history_gap = 0.0;
  /// Same, leaving out the last two entries of the shorter history.
  double max_gap_before_tail = 0.0;
  SolveReport report_a;
  SolveReport report_b;
};

ConvergenceComparison compare_convergence(const CsrMatrix& a, std::span<const double> b, const CgConfig& cfg_a,
                                          const CgConfig& cfg_b);
ConvergenceComparison compare_histories(const SolveReport& a, const SolveReport& b);

/// b = A·1, so the exact solution is all ones.
std::vector<double> ones_rhs(const CsrMatrix& a);

/// ‖A x - b‖₂ / ‖b‖₂ computed from scratch.
double relative_residual(const CsrMatrix& a, std::span<const double> x, std::span<const double> b);

}  // namespace trilab
