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
#include <limits>
#include <string>
#include <tuple>

#include "trilab/precond.hpp"

namespace trilab {

namespace {

CsrMatrix transpose_strict(const CsrMatrix& m) {
  CsrMatrix t;
  t.n = m.n;
  t.row_ptr.assign(static_cast<std::size_t>(m.n) + 1, 0);
  for (Index j : m.col_idx) ++t.row_ptr[j + 1];
  for (Index i = 0; i < m.n; ++i) t.row_ptr[i + 1] += t.row_ptr[i];
  t.col_idx.resize(m.col_idx.size());
  t.values.resize(m.values.size());
  std::vector<Offset> fill(t.row_ptr.begin(), t.row_ptr.end() - 1);
  for (Index i = 0; i < m.n; ++i) {
    for (Offset k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
      const Offset dst = fill[m.col_idx[k]]++;
      t.col_idx[dst] = i;
      t.values[dst] = m.values[k];
    }
  }
  return t;
}

double shifted_diagonal(const CsrMatrix& a, Index i, double shift) { return a.diagonal(i) * (1.0 + shift); }

}  // namespace

IcFactor ic0_factorize(const CsrMatrix& a, double shift, OrderingKind tag) {
  if (!(shift >= 0.0) || !std::isfinite(shift)) throw InvalidArgument("shift must be finite and >= 0");
  if (a.diag_ptr.size() != static_cast<std::size_t>(a.n)) throw InvalidArgument("IC(0) needs every diagonal stored");
  if (!a.structurally_symmetric()) throw InvalidArgument("IC(0) needs a structurally symmetric matrix");

  const Index n = a.n;
  // Lower triangle of A' including the diagonal; the diagonal ends each row.
  std::vector<Offset> ptr(static_cast<std::size_t>(n) + 1, 0);
  for (Index i = 0; i < n; ++i) ptr[i + 1] = ptr[i] + (a.diag_ptr[i] - a.row_ptr[i]) + 1;
  std::vector<Index> col(ptr.back());
  std::vector<double> work(ptr.back());
  for (Index i = 0; i < n; ++i) {
    Offset dst = ptr[i];
    for (Offset k = a.row_ptr[i]; k <= a.diag_ptr[i]; ++k, ++dst) {
      col[dst] = a.col_idx[k];
      work[dst] = a.col_idx[k] == i ? shifted_diagonal(a, i, shift) : a.values[k];
    }
  }

  // Column view: positions of (i, k), i > k, ascending i.
  std::vector<Offset> cptr(static_cast<std::size_t>(n) + 1, 0);
  for (Index i = 0; i < n; ++i) {
    for (Offset q = ptr[i]; q < ptr[i + 1] - 1; ++q) ++cptr[col[q] + 1];
  }
  for (Index k = 0; k < n; ++k) cptr[k + 1] += cptr[k];
  std::vector<Offset> cpos(cptr.back());
  std::vector<Index> crow(cptr.back());
  {
    std::vector<Offset> fill(cptr.begin(), cptr.end() - 1);
    for (Index i = 0; i < n; ++i) {
      for (Offset q = ptr[i]; q < ptr[i + 1] - 1; ++q) {
        const Offset dst = fill[col[q]]++;
        cpos[dst] = q;
        crow[dst] = i;
      }
    }
  }

  for (Index k = 0; k < n; ++k) {
    const double pivot = work[ptr[k + 1] - 1];
    if (!(pivot > 0.0)) {
      throw BreakdownError(k, pivot, "IC(0) breakdown: pivot " + std::to_string(pivot) + " at row " + std::to_string(k));
    }
    const double d = std::sqrt(pivot);
    work[ptr[k + 1] - 1] = d;
    for (Offset c = cptr[k]; c < cptr[k + 1]; ++c) work[cpos[c]] /= d;

    for (Offset c1 = cptr[k]; c1 < cptr[k + 1]; ++c1) {
      const Index i = crow[c1];
      const double lik = work[cpos[c1]];
      const auto row_begin = col.begin() + ptr[i];
      const auto row_end = col.begin() + ptr[i + 1];
      for (Offset c2 = cptr[k]; c2 <= c1; ++c2) {
        const Index j = crow[c2];
        // Updates outside the kept pattern are dropped.
        const auto it = std::lower_bound(row_begin, row_end, j);
        if (it == row_end || *it != j) continue;
        work[it - col.begin()] -= lik * work[cpos[c2]];
      }
    }
  }

  IcFactor f;
  f.n = n;
  f.shift = shift;
  f.tag = tag;
  f.diag.resize(n);
  f.inv_diag.resize(n);
  f.lower.n = n;
  f.lower.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  f.lower.col_idx.reserve(ptr.back() - n);
  f.lower.values.reserve(ptr.back() - n);
  for (Index i = 0; i < n; ++i) {
    for (Offset q = ptr[i]; q < ptr[i + 1] - 1; ++q) {
      f.lower.col_idx.push_back(col[q]);
      f.lower.values.push_back(work[q]);
    }
    f.lower.row_ptr[i + 1] = static_cast<Offset>(f.lower.col_idx.size());
    f.diag[i] = work[ptr[i + 1] - 1];
    f.inv_diag[i] = 1.0 / f.diag[i];
  }
  f.upper = transpose_strict(f.lower);
  return f;
}

double ic0_residual_on_pattern(const CsrMatrix& a, const IcFactor& f) {
  if (a.n != f.n) throw DimensionError("factor does not match matrix");
  std::vector<double> row(f.n, 0.0);
  double worst = 0.0;
  for (Index i = 0; i < a.n; ++i) {
    const auto li = f.lower.cols(i);
    const auto lv = f.lower.vals(i);
    for (std::size_t t = 0; t < li.size(); ++t) row[li[t]] = lv[t];
    row[i] = f.diag[i];

    const double aii = a.diagonal(i) * (1.0 + f.shift);
    for (Offset q = a.row_ptr[i]; q < a.row_ptr[i + 1]; ++q) {
      const Index j = a.col_idx[q];
      if (j > i) break;
      double s = 0.0;
      const auto lj = f.lower.cols(j);
      const auto ljv = f.lower.vals(j);
      for (std::size_t t = 0; t < lj.size(); ++t) s += row[lj[t]] * ljv[t];
      s += row[j] * f.diag[j];
      const double target = j == i ? aii : a.values[q];
      const double ajj = a.diagonal(j) * (1.0 + f.shift);
      worst = std::max(worst, std::abs(s - target) / std::sqrt(aii * ajj));
    }

    for (Index j : li) row[j] = 0.0;
    row[i] = 0.0;
  }
  return worst;
}

bool ic0_pattern_matches(const CsrMatrix& a, const IcFactor& f) {
  if (a.n != f.n || f.lower.n != a.n) return false;
  for (Index i = 0; i < a.n; ++i) {
    const auto ac = a.cols(i);
    const auto lc = f.lower.cols(i);
    const auto strict_end = std::lower_bound(ac.begin(), ac.end(), i);
    if (!std::equal(ac.begin(), strict_end, lc.begin(), lc.end())) return false;
  }
  return true;
}

EquivalenceResult factor_equivalence_check(const CsrMatrix& a, const Permutation& p, double shift, double tolerance) {
  if (p.size() != a.n) throw DimensionError("permutation size does not match matrix");
  using Entry = std::tuple<Index, Index, double>;
  auto entries = [](const IcFactor& f, const Permutation* q) {
    std::vector<Entry> out;
    out.reserve(f.lower.col_idx.size() + f.n);
    auto map = [&](Index i) { return q ? (*q)(i) : i; };
    for (Index i = 0; i < f.n; ++i) {
      for (Offset k = f.lower.row_ptr[i]; k < f.lower.row_ptr[i + 1]; ++k)
        out.emplace_back(map(i), map(f.lower.col_idx[k]), f.lower.values[k]);
      out.emplace_back(map(i), map(i), f.diag[i]);
    }
    std::sort(out.begin(), out.end(), [](const Entry& x, const Entry& y) {
      return std::tie(std::get<0>(x), std::get<1>(x)) < std::tie(std::get<0>(y), std::get<1>(y));
    });
    return out;
  };

  std::vector<Entry> lhs, rhs;
  try {
    lhs = entries(ic0_factorize(a, shift), &p);
    rhs = entries(ic0_factorize(permute_matrix(a, p), shift), nullptr);
  } catch (const BreakdownError&) {
    return {false, std::numeric_limits<double>::infinity()};
  }

  double worst = 0.0;
  auto gap = [](double x, double y) {
    const double scale = std::max(std::abs(x), std::abs(y));
    return scale == 0.0 ? 0.0 : std::abs(x - y) / scale;
  };
  std::size_t s = 0, t = 0;
  while (s < lhs.size() || t < rhs.size()) {
    const bool take_l = t == rhs.size() ||
                        (s < lhs.size() && std::tie(std::get<0>(lhs[s]), std::get<1>(lhs[s])) <
                                               std::tie(std::get<0>(rhs[t]), std::get<1>(rhs[t])));
    const bool take_r = s == lhs.size() ||
                        (t < rhs.size() && std::tie(std::get<0>(rhs[t]), std::get<1>(rhs[t])) <
                                               std::tie(std::get<0>(lhs[s]), std::get<1>(lhs[s])));
    if (take_l) {
      worst = std::max(worst, gap(std::get<2>(lhs[s++]), 0.0));
    } else if (take_r) {
      worst = std::max(worst, gap(0.0, std::get<2>(rhs[t++])));
    } else {
      worst = std::max(worst, gap(std::get<2>(lhs[s++]), std::get<2>(rhs[t++])));
    }
  }
  return {worst <= tolerance, worst};
}

}  // namespace trilab
