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

#include "trilab/check.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <random>
#include <sstream>

namespace trilab {

bool CheckResult::passed() const noexcept {
  return std::all_of(items.begin(), items.end(), [](const CheckItem& i) { return i.passed; });
}

std::vector<std::string> CheckResult::failing_properties() const {
  std::vector<std::string> out;
  for (const auto& i : items) {
    if (!i.passed && std::find(out.begin(), out.end(), i.property) == out.end()) out.push_back(i.property);
  }
  return out;
}

double max_relative_error(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw DimensionError("vectors differ in length");
  double worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double scale = std::max(std::abs(u[i]), std::abs(v[i]));
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(u[i] - v[i]) / scale);
  }
  return worst;
}

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

std::vector<double> random_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

bool bitwise_equal(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

/// Swaps the targets of the first coupled pair, which reverses its order.
Permutation corrupt(const CsrMatrix& a, const Permutation& p) {
  std::vector<Index> f = p.forward();
  for (Index i = 0; i < a.n; ++i) {
    for (Index j : a.cols(i)) {
      if (j > i) {
        std::swap(f[i], f[j]);
        return Permutation::from_forward(std::move(f));
      }
    }
  }
  return p;
}

struct KernelRun {
  double forward_err = 0.0;
  double backward_err = 0.0;
  bool barriers_ok = true;
  bool deterministic = true;
  std::size_t barrier_seen = 0;
};

template <typename Fwd, typename Bwd>
KernelRun run_kernels(const IcFactor& f, std::span<const double> r, const std::vector<std::size_t>& threads,
                      std::size_t expected_barriers, Fwd&& fwd, Bwd&& bwd) {
  std::vector<double> y_ref(f.n), z_ref(f.n);
  sub_forward_seq(f, r, y_ref);
  sub_backward_seq(f, y_ref, z_ref);
  KernelRun out;
  std::vector<double> y0, z0;
  for (std::size_t t : threads) {
    ThreadPool pool(t);
    std::vector<double> y(f.n), z(f.n);
    BarrierCounter bf, bb;
    fwd(r, std::span<double>(y), pool, &bf);
    bwd(std::span<const double>(y_ref), std::span<double>(z), pool, &bb);
    out.forward_err = std::max(out.forward_err, max_relative_error(y, y_ref));
    out.backward_err = std::max(out.backward_err, max_relative_error(z, z_ref));
    out.barrier_seen = std::max({out.barrier_seen, bf.count, bb.count});
    if (bf.count != expected_barriers || bb.count != expected_barriers) out.barriers_ok = false;
    if (y0.empty()) {
      y0 = y;
      z0 = z;
    } else if (!bitwise_equal(y, y0) || !bitwise_equal(z, z0)) {
      out.deterministic = false;
    }
  }
  return out;
}

std::string thread_list(const std::vector<std::size_t>& threads) {
  std::string s = "{";
  for (std::size_t k = 0; k < threads.size(); ++k) s += (k ? "," : "") + std::to_string(threads[k]);
  return s + "}";
}

}  // namespace

CheckResult run_check_suite(const CsrMatrix& a, const CheckOptions& o) {
  if (o.block_sizes.empty() || o.widths.empty() || o.threads.empty())
    throw InvalidArgument("check needs at least one block size, width and thread count");
  CheckResult res;
  auto add = [&](std::string property, Index bs, Index w, bool ok, std::string detail) {
    res.items.push_back({std::move(property), bs, w, ok, std::move(detail)});
  };
  const std::string tl = thread_list(o.threads);

  auto factor_checks = [&](const CsrMatrix& m, const IcFactor& f, Index bs, Index w) {
    const double resid = ic0_residual_on_pattern(m, f);
    add("ic0_residual", bs, w, resid <= o.factor_tolerance, "max deviation " + fmt(resid));
    const bool pattern = ic0_pattern_matches(m, f);
    add("ic0_pattern", bs, w, pattern, pattern ? "pattern(L) equals lower pattern" : "pattern(L) differs");
  };

  {
    const NodalColoring mc = greedy_color_nodes(a);
    const CsrMatrix am = permute_matrix(a, mc.perm);
    const IcFactor f = ic0_factorize(am, o.shift, OrderingKind::mc);
    factor_checks(am, f, 0, 0);
    const auto r = random_vector(a.n, o.seed);
    const auto expected = static_cast<std::size_t>(mc.n_colors - 1);
    const KernelRun k = run_kernels(
        f, r, o.threads, expected,
        [&](auto in, auto out, ThreadPool& p, BarrierCounter* c) { sub_forward_mc(f, mc, in, out, p, c); },
        [&](auto in, auto out, ThreadPool& p, BarrierCounter* c) { sub_backward_mc(f, mc, in, out, p, c); });
    const double err = std::max(k.forward_err, k.backward_err);
    add("kernel_oracle_mc", 0, 0, err <= o.kernel_tolerance, "max rel err " + fmt(err) + " at threads " + tl);
    add("barrier_contract_mc", 0, 0, k.barriers_ok,
        "n_c=" + std::to_string(mc.n_colors) + ", max barriers per sweep " + std::to_string(k.barrier_seen));
  }

  for (Index bs : o.block_sizes) {
    const BmcLayout bmc = build_bmc(a, bs);
    const CsrMatrix ab = permute_matrix(a, bmc.perm);
    const IcFactor fb = ic0_factorize(ab, o.shift, OrderingKind::bmc);
    factor_checks(ab, fb, bs, 0);
    const auto rb = random_vector(a.n, o.seed + static_cast<std::uint64_t>(bs));
    const auto expected = static_cast<std::size_t>(bmc.n_colors - 1);
    const KernelRun kb = run_kernels(
        fb, rb, o.threads, expected,
        [&](auto in, auto out, ThreadPool& p, BarrierCounter* c) { sub_forward_bmc(fb, bmc, in, out, p, c); },
        [&](auto in, auto out, ThreadPool& p, BarrierCounter* c) { sub_backward_bmc(fb, bmc, in, out, p, c); });
    const double eb = std::max(kb.forward_err, kb.backward_err);
    add("kernel_oracle_bmc", bs, 0, eb <= o.kernel_tolerance, "max rel err " + fmt(eb) + " at threads " + tl);
    add("barrier_contract_bmc", bs, 0, kb.barriers_ok,
        "n_c=" + std::to_string(bmc.n_colors) + ", max barriers per sweep " + std::to_string(kb.barrier_seen));

    for (Index w : o.widths) {
      const HbmcLayout h = build_hbmc(bmc, w);
      const CsrMatrix ext = bmc_extended_matrix(a, h);
      const Permutation secondary = o.corrupt_permutation ? corrupt(ext, h.perm) : h.perm;

      const ErReport er = check_er_condition(ext, secondary);
      add("er_condition", bs, w, er.holds,
          std::to_string(er.violation_count) + " violations in " + std::to_string(er.pairs_checked) + " pairs");

      const CsrMatrix ah = permute_matrix(ext, h.perm);
      const StructureReport st = scan_hbmc_structure(ah, h);
      add("level2_structure", bs, w, st.level2_diagonal && st.level1_independent,
          std::to_string(st.level2_offenders) + " level-2 and " + std::to_string(st.level1_offenders) +
              " level-1 offenders");

      const EquivalenceResult eq = factor_equivalence_check(ext, secondary, o.shift, o.factor_tolerance);
      add("factor_equivalence", bs, w, eq.equivalent, "max deviation " + fmt(eq.max_deviation));

      const IcFactor fh = ic0_factorize(ah, o.shift, OrderingKind::hbmc);
      factor_checks(ah, fh, bs, w);
      const SellFactor sf = build_sell_factor(fh, h);
      auto rh = random_vector(h.n_padded, o.seed + 1000 * static_cast<std::uint64_t>(bs) + static_cast<std::uint64_t>(w));
      for (Index i = 0; i < h.n_padded; ++i) {
        if (h.is_dummy[i]) rh[i] = 0.0;
      }
      const KernelRun kh = run_kernels(
          fh, rh, o.threads, static_cast<std::size_t>(h.base.n_colors - 1),
          [&](auto in, auto out, ThreadPool& p, BarrierCounter* c) { sub_forward_hbmc(sf, h, in, out, p, c); },
          [&](auto in, auto out, ThreadPool& p, BarrierCounter* c) { sub_backward_hbmc(sf, h, in, out, p, c); });
      const double eh = std::max(kh.forward_err, kh.backward_err);
      add("kernel_oracle_hbmc", bs, w, eh <= o.kernel_tolerance,
          "max rel err " + fmt(eh) + " at threads " + tl + " (" + hbmc_kernel_isa(w) + ")");
      add("hbmc_thread_determinism", bs, w, kh.deterministic,
          kh.deterministic ? "bit-identical across threads " + tl : "outputs differ across threads " + tl);
      add("barrier_contract_hbmc", bs, w, kh.barriers_ok,
          "n_c=" + std::to_string(h.base.n_colors) + ", max barriers per sweep " + std::to_string(kh.barrier_seen));
    }
  }
  return res;
}

}  // namespace trilab
