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

#include <string>

#include "trilab/precond.hpp"

namespace trilab {

namespace {

inline void solve_row(const CsrMatrix& t, const std::vector<double>& inv_diag, std::span<const double> rhs,
                      std::span<double> out, Index i) noexcept {
  double s = rhs[i];
  for (Offset k = t.row_ptr[i]; k < t.row_ptr[i + 1]; ++k) s -= t.values[k] * out[t.col_idx[k]];
  out[i] = s * inv_diag[i];
}

void check_sizes(const IcFactor& f, std::size_t in, std::size_t out) {
  if (in != static_cast<std::size_t>(f.n) || out != static_cast<std::size_t>(f.n))
    throw DimensionError("vector length does not match factor size " + std::to_string(f.n));
}

void check_tag(const IcFactor& f, OrderingKind want, Index layout_size) {
  if (f.tag != want)
    throw LayoutMismatch("factor was built under " + std::string(to_string(f.tag)) + " ordering, kernel expects " +
                         std::string(to_string(want)));
  if (f.n != layout_size) throw LayoutMismatch("factor size does not match layout size");
}

void check_diag(const IcFactor& f) {
  for (Index i = 0; i < f.n; ++i) {
    if (f.diag[i] == 0.0) throw BreakdownError(i, 0.0, "zero diagonal in triangular factor at row " + std::to_string(i));
  }
}

class BarrierScope {
 public:
  BarrierScope(ThreadPool& pool, BarrierCounter* out) : pool_(pool), out_(out), start_(pool.sync_count()) {}
  ~BarrierScope() {
    if (out_) out_->count = pool_.sync_count() - start_;
  }

 private:
  ThreadPool& pool_;
  BarrierCounter* out_;
  std::size_t start_;
};

}  // namespace

void sub_forward_seq(const IcFactor& f, std::span<const double> r, std::span<double> y) {
  check_sizes(f, r.size(), y.size());
  check_diag(f);
  for (Index i = 0; i < f.n; ++i) solve_row(f.lower, f.inv_diag, r, y, i);
}

void sub_backward_seq(const IcFactor& f, std::span<const double> y, std::span<double> z) {
  check_sizes(f, y.size(), z.size());
  check_diag(f);
  for (Index i = f.n - 1; i >= 0; --i) solve_row(f.upper, f.inv_diag, y, z, i);
}

void sub_forward_mc(const IcFactor& f, const NodalColoring& layout, std::span<const double> r, std::span<double> y,
                    ThreadPool& pool, BarrierCounter* barriers) {
  check_tag(f, OrderingKind::mc, layout.size());
  check_sizes(f, r.size(), y.size());
  BarrierScope scope(pool, barriers);
  pool.run([&](Team& team) {
    for (Index c = 0; c < layout.n_colors; ++c) {
      const Index first = layout.color_ptr[c];
      const auto [b, e] = team.share(static_cast<std::size_t>(layout.color_ptr[c + 1] - first));
      for (auto i = first + static_cast<Index>(b); i < first + static_cast<Index>(e); ++i)
        solve_row(f.lower, f.inv_diag, r, y, i);
      if (c + 1 < layout.n_colors) team.sync();
    }
  });
}

void sub_backward_mc(const IcFactor& f, const NodalColoring& layout, std::span<const double> y, std::span<double> z,
                     ThreadPool& pool, BarrierCounter* barriers) {
  check_tag(f, OrderingKind::mc, layout.size());
  check_sizes(f, y.size(), z.size());
  BarrierScope scope(pool, barriers);
  pool.run([&](Team& team) {
    for (Index c = layout.n_colors - 1; c >= 0; --c) {
      const Index first = layout.color_ptr[c];
      const auto [b, e] = team.share(static_cast<std::size_t>(layout.color_ptr[c + 1] - first));
      for (auto i = first + static_cast<Index>(e) - 1; i >= first + static_cast<Index>(b); --i)
        solve_row(f.upper, f.inv_diag, y, z, i);
      if (c > 0) team.sync();
    }
  });
}

void sub_forward_bmc(const IcFactor& f, const BmcLayout& layout, std::span<const double> r, std::span<double> y,
                     ThreadPool& pool, BarrierCounter* barriers) {
  check_tag(f, OrderingKind::bmc, layout.size());
  check_sizes(f, r.size(), y.size());
  BarrierScope scope(pool, barriers);
  pool.run([&](Team& team) {
    for (Index c = 0; c < layout.n_colors; ++c) {
      const Index first = layout.color_block_ptr[c];
      const auto [b, e] = team.share(static_cast<std::size_t>(layout.color_block_ptr[c + 1] - first));
      // Blocks of one color are contiguous, so a share of blocks is a row range.
      const Index row_begin = layout.block_start[first + b];
      const Index row_end = layout.block_start[first + e];
      for (Index i = row_begin; i < row_end; ++i) solve_row(f.lower, f.inv_diag, r, y, i);
      if (c + 1 < layout.n_colors) team.sync();
    }
  });
}

void sub_backward_bmc(const IcFactor& f, const BmcLayout& layout, std::span<const double> y, std::span<double> z,
                      ThreadPool& pool, BarrierCounter* barriers) {
  check_tag(f, OrderingKind::bmc, layout.size());
  check_sizes(f, y.size(), z.size());
  BarrierScope scope(pool, barriers);
  pool.run([&](Team& team) {
    for (Index c = layout.n_colors - 1; c >= 0; --c) {
      const Index first = layout.color_block_ptr[c];
      const auto [b, e] = team.share(static_cast<std::size_t>(layout.color_block_ptr[c + 1] - first));
      const Index row_begin = layout.block_start[first + b];
      const Index row_end = layout.block_start[first + e];
      for (Index i = row_end - 1; i >= row_begin; --i) solve_row(f.upper, f.inv_diag, y, z, i);
      if (c > 0) team.sync();
    }
  });
}

void apply_ic_preconditioner(const IcPreconditioner& p, std::span<const double> r, std::span<double> z,
                             std::span<double> scratch, ThreadPool& pool, std::size_t* barrier_total) {
  BarrierCounter fwd, bwd;
  switch (p.kind) {
    case OrderingKind::natural:
      sub_forward_seq(p.factor, r, scratch);
      sub_backward_seq(p.factor, scratch, z);
      break;
    case OrderingKind::mc:
      if (!p.mc) throw LayoutMismatch("MC preconditioner without a coloring");
      sub_forward_mc(p.factor, *p.mc, r, scratch, pool, &fwd);
      sub_backward_mc(p.factor, *p.mc, scratch, z, pool, &bwd);
      break;
    case OrderingKind::bmc:
      if (!p.bmc) throw LayoutMismatch("BMC preconditioner without a layout");
      sub_forward_bmc(p.factor, *p.bmc, r, scratch, pool, &fwd);
      sub_backward_bmc(p.factor, *p.bmc, scratch, z, pool, &bwd);
      break;
    case OrderingKind::hbmc:
      if (!p.hbmc || !p.sell) throw LayoutMismatch("HBMC preconditioner without a SELL factor");
      sub_forward_hbmc(*p.sell, *p.hbmc, r, scratch, pool, &fwd);
      sub_backward_hbmc(*p.sell, *p.hbmc, scratch, z, pool, &bwd);
      break;
  }
  if (barrier_total) *barrier_total += fwd.count + bwd.count;
}

}  // namespace trilab
