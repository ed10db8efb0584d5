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
#include <array>
#include <string>

#include "trilab/precond.hpp"

#if TRILAB_X86_SIMD
#include <immintrin.h>
#endif

namespace trilab {

namespace {

/// One level-2 step: rows [row0, row0 + W) from one SELL slice.
/// x[row] = (rhs[row] - Σ_e val_e * x[col_e]) * inv[row]; rhs must not alias x.
struct Step {
  const double* vals;
  const Index* cols;
  Index len;
  Index row0;
};

using StepFn = void (*)(const Step&, const double* rhs, const double* inv, double* x);

template <int W>
void step_fixed(const Step& s, const double* rhs, const double* inv, double* x) {
  std::array<double, W> t;
  for (int m = 0; m < W; ++m) t[m] = rhs[s.row0 + m];
  for (Index e = 0; e < s.len; ++e) {
    const double* v = s.vals + static_cast<Offset>(e) * W;
    const Index* c = s.cols + static_cast<Offset>(e) * W;
    for (int m = 0; m < W; ++m) t[m] -= v[m] * x[c[m]];
  }
  for (int m = 0; m < W; ++m) x[s.row0 + m] = t[m] * inv[s.row0 + m];
}

template <Index W>
StepFn scalar_step_for() {
  return &step_fixed<W>;
}

void step_any(const Step& s, Index w, const double* rhs, const double* inv, double* x) {
  for (Index m = 0; m < w; ++m) {
    double t = rhs[s.row0 + m];
    for (Index e = 0; e < s.len; ++e) {
      const Offset k = static_cast<Offset>(e) * w + m;
      t -= s.vals[k] * x[s.cols[k]];
    }
    x[s.row0 + m] = t * inv[s.row0 + m];
  }
}

#if TRILAB_X86_SIMD

__attribute__((target("avx512f"))) void step8_avx512(const Step& s, const double* rhs, const double* inv, double* x) {
  __m512d t = _mm512_loadu_pd(rhs + s.row0);
  for (Index e = 0; e < s.len; ++e) {
    const Offset k = static_cast<Offset>(e) * 8;
    const __m256i idx = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(s.cols + k));
    const __m512d v = _mm512_loadu_pd(s.vals + k);
    const __m512d g = _mm512_i32gather_pd(idx, x, 8);
    t = _mm512_sub_pd(t, _mm512_mul_pd(v, g));
  }
  _mm512_storeu_pd(x + s.row0, _mm512_mul_pd(t, _mm512_loadu_pd(inv + s.row0)));
}

__attribute__((target("avx2"))) void step4_avx2(const Step& s, const double* rhs, const double* inv, double* x) {
  __m256d t = _mm256_loadu_pd(rhs + s.row0);
  for (Index e = 0; e < s.len; ++e) {
    const Offset k = static_cast<Offset>(e) * 4;
    const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(s.cols + k));
    const __m256d v = _mm256_loadu_pd(s.vals + k);
    const __m256d g = _mm256_i32gather_pd(x, idx, 8);
    t = _mm256_sub_pd(t, _mm256_mul_pd(v, g));
  }
  _mm256_storeu_pd(x + s.row0, _mm256_mul_pd(t, _mm256_loadu_pd(inv + s.row0)));
}

__attribute__((target("avx2"))) void step8_avx2(const Step& s, const double* rhs, const double* inv, double* x) {
  __m256d lo = _mm256_loadu_pd(rhs + s.row0);
  __m256d hi = _mm256_loadu_pd(rhs + s.row0 + 4);
  for (Index e = 0; e < s.len; ++e) {
    const Offset k = static_cast<Offset>(e) * 8;
    const __m128i ilo = _mm_loadu_si128(reinterpret_cast<const __m128i*>(s.cols + k));
    const __m128i ihi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(s.cols + k + 4));
    lo = _mm256_sub_pd(lo, _mm256_mul_pd(_mm256_loadu_pd(s.vals + k), _mm256_i32gather_pd(x, ilo, 8)));
    hi = _mm256_sub_pd(hi, _mm256_mul_pd(_mm256_loadu_pd(s.vals + k + 4), _mm256_i32gather_pd(x, ihi, 8)));
  }
  _mm256_storeu_pd(x + s.row0, _mm256_mul_pd(lo, _mm256_loadu_pd(inv + s.row0)));
  _mm256_storeu_pd(x + s.row0 + 4, _mm256_mul_pd(hi, _mm256_loadu_pd(inv + s.row0 + 4)));
}

bool has_avx512() {
  static const bool v = __builtin_cpu_supports("avx512f");
  return v;
}

bool has_avx2() {
  static const bool v = __builtin_cpu_supports("avx2");
  return v;
}

#endif

struct Dispatch {
  StepFn fn = nullptr;  // null: use step_any
  const char* isa = "scalar";
};

Dispatch pick(Index w) {
#if TRILAB_X86_SIMD
  if (w == 8 && has_avx512()) return {&step8_avx512, "avx512"};
  if (w == 8 && has_avx2()) return {&step8_avx2, "avx2"};
  if (w == 4 && has_avx2()) return {&step4_avx2, "avx2"};
#endif
  switch (w) {
    case 1: return {scalar_step_for<1>(), "scalar"};
    case 2: return {scalar_step_for<2>(), "scalar"};
    case 4: return {scalar_step_for<4>(), "scalar"};
    case 8: return {scalar_step_for<8>(), "scalar"};
    case 16: return {scalar_step_for<16>(), "scalar"};
    default: return {};
  }
}

void check_pair(const SellFactor& f, const HbmcLayout& layout, std::size_t in, std::size_t out) {
  if (f.n != layout.n_padded || f.width != layout.width || f.block_size != layout.block_size ||
      f.level1_ptr != layout.level1_ptr)
    throw LayoutMismatch("SELL factor was built for a different HBMC layout");
  if (in != static_cast<std::size_t>(f.n) || out != static_cast<std::size_t>(f.n))
    throw DimensionError("HBMC kernels need vectors padded to " + std::to_string(f.n));
}

enum class Sweep { forward, backward };

void run_sweep(Sweep dir, const SellFactor& f, std::span<const double> rhs, std::span<double> x, ThreadPool& pool,
               BarrierCounter* barriers) {
  const SellMatrix& m = dir == Sweep::forward ? f.lower : f.upper;
  const Dispatch d = pick(f.width);
  const Index w = f.width;
  const Index bs = f.block_size;
  const Index span = bs * w;
  const auto n_colors = static_cast<Index>(f.level1_ptr.size()) - 1;
  const double* r = rhs.data();
  const double* inv = f.inv_diag.data();
  double* out = x.data();

  auto step = [&](Index slice) {
    const Step s{m.values.data() + m.slice_ptr[slice], m.col_idx.data() + m.slice_ptr[slice], m.slice_len[slice],
                 slice * w};
    if (d.fn) {
      d.fn(s, r, inv, out);
    } else {
      step_any(s, w, r, inv, out);
    }
  };

  const std::size_t start = pool.sync_count();
  pool.run([&](Team& team) {
    for (Index t = 0; t < n_colors; ++t) {
      const Index c = dir == Sweep::forward ? t : n_colors - 1 - t;
      const Index first = f.level1_ptr[c];
      const auto [b, e] = team.share(static_cast<std::size_t>(f.level1_ptr[c + 1] - first));
      for (auto k = first + static_cast<Index>(b); k < first + static_cast<Index>(e); ++k) {
        // Padding entries read the row's own slot; clear the block first.
        std::fill(out + static_cast<Offset>(k) * span, out + static_cast<Offset>(k + 1) * span, 0.0);
        if (dir == Sweep::forward) {
          for (Index j = 0; j < bs; ++j) step(k * bs + j);
        } else {
          for (Index j = bs - 1; j >= 0; --j) step(k * bs + j);
        }
      }
      if (t + 1 < n_colors) team.sync();
    }
  });
  if (barriers) barriers->count = pool.sync_count() - start;
}

void check_level2(const SellMatrix& m, Index w) {
  for (Index s = 0; s < m.n_slices(); ++s) {
    const Index row0 = s * w;
    for (Offset k = m.slice_ptr[s]; k < m.slice_ptr[s + 1]; ++k) {
      const Index row = row0 + static_cast<Index>((k - m.slice_ptr[s]) % w);
      const Index c = m.col_idx[k];
      if (c >= row0 && c < row0 + w && c != row)
        throw LayoutMismatch("level-2 step at row " + std::to_string(row0) + " is coupled to itself");
    }
  }
}

}  // namespace

SellFactor build_sell_factor(const IcFactor& f, const HbmcLayout& layout) {
  if (f.tag != OrderingKind::hbmc) throw LayoutMismatch("SELL factor needs a factor built under HBMC ordering");
  if (f.n != layout.n_padded) throw LayoutMismatch("factor size does not match the padded HBMC layout");
  SellFactor s;
  s.n = f.n;
  s.block_size = layout.block_size;
  s.width = layout.width;
  s.level1_ptr = layout.level1_ptr;
  s.lower = csr_to_sell(f.lower, layout.width);
  s.upper = csr_to_sell(f.upper, layout.width);
  s.inv_diag = f.inv_diag;
  check_level2(s.lower, s.width);
  check_level2(s.upper, s.width);
  return s;
}

void sub_forward_hbmc(const SellFactor& f, const HbmcLayout& layout, std::span<const double> r, std::span<double> y,
                      ThreadPool& pool, BarrierCounter* barriers) {
  check_pair(f, layout, r.size(), y.size());
  run_sweep(Sweep::forward, f, r, y, pool, barriers);
}

void sub_backward_hbmc(const SellFactor& f, const HbmcLayout& layout, std::span<const double> y, std::span<double> z,
                       ThreadPool& pool, BarrierCounter* barriers) {
  check_pair(f, layout, y.size(), z.size());
  run_sweep(Sweep::backward, f, y, z, pool, barriers);
}

const char* hbmc_kernel_isa(Index width) noexcept { return pick(width).isa; }

Index host_simd_width() noexcept {
#if TRILAB_X86_SIMD
  if (has_avx512()) return 8;
  if (has_avx2()) return 4;
#endif
  return 2;
}

}  // namespace trilab
