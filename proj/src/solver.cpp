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

#include "trilab/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "json.hpp"

namespace trilab {

std::string_view to_string(SpmvFormat f) noexcept { return f == SpmvFormat::sell ? "sell" : "crs"; }

SpmvFormat parse_format(std::string_view name) {
  if (name == "crs" || name == "csr") return SpmvFormat::crs;
  if (name == "sell") return SpmvFormat::sell;
  throw InvalidArgument("unknown SpMV format '" + std::string(name) + "', expected crs or sell");
}

void CgConfig::validate() const {
  if (!(tol > 0.0)) throw InvalidArgument("tol must be > 0");
  if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  if (block_size < 1) throw InvalidArgument("block size must be >= 1");
  if (width < 1) throw InvalidArgument("SIMD width must be >= 1");
  if (!(shift >= 0.0) || !std::isfinite(shift)) throw InvalidArgument("shift must be finite and >= 0");
}

// Vector algebra

void VectorOps::for_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) const {
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  if (pool_.size() == 1 || chunks <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(c * kChunk, std::min(n, (c + 1) * kChunk));
    return;
  }
  pool_.run([&](Team& team) {
    const auto [b, e] = team.share(chunks);
    for (std::size_t c = b; c < e; ++c) fn(c * kChunk, std::min(n, (c + 1) * kChunk));
  });
}

double VectorOps::dot(std::span<const double> u, std::span<const double> v) const {
  const std::size_t n = u.size();
  std::vector<double> partial((n + kChunk - 1) / kChunk, 0.0);
  for_chunks(n, [&](std::size_t b, std::size_t e) {
    double s = 0.0;
    if (skip_.empty()) {
      for (std::size_t i = b; i < e; ++i) s += u[i] * v[i];
    } else {
      for (std::size_t i = b; i < e; ++i) {
        if (!skip_[i]) s += u[i] * v[i];
      }
    }
    partial[b / kChunk] = s;
  });
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

double VectorOps::norm2(std::span<const double> u) const { return std::sqrt(dot(u, u)); }

// CG

CgOutcome conjugate_gradient(const CsrMatrix& a, const SellMatrix* a_sell, std::span<const double> b,
                             std::span<double> x, const IcPreconditioner& m, std::span<const unsigned char> skip,
                             double tol, Index max_iters, ThreadPool& pool) {
  const auto n = static_cast<std::size_t>(a.n);
  if (b.size() != n || x.size() != n || m.size() != a.n || (!skip.empty() && skip.size() != n))
    throw DimensionError("CG operands do not match the matrix size");
  VectorOps ops(pool, skip);
  std::vector<double> r(b.begin(), b.end()), z(n), p(n), q(n), scratch(n);
  std::fill(x.begin(), x.end(), 0.0);

  auto matvec = [&](std::span<const double> in, std::span<double> out) {
    if (a_sell) {
      spmv(*a_sell, in, out, &pool);
    } else {
      spmv(a, in, out, &pool);
    }
  };

  CgOutcome out;
  const double bnorm = ops.norm2(b);
  if (bnorm == 0.0) {
    out.converged = true;
    out.residual_history.push_back(0.0);
    return out;
  }
  out.residual_history.push_back(ops.norm2(r) / bnorm);

  apply_ic_preconditioner(m, r, z, scratch, pool, &out.barrier_total);
  std::copy(z.begin(), z.end(), p.begin());
  double rz = ops.dot(r, z);

  for (Index it = 1; it <= max_iters; ++it) {
    matvec(p, q);
    const double pq = ops.dot(p, q);
    if (!(pq > 0.0) || !std::isfinite(pq)) {
      throw CgBreakdown(it, "CG breakdown at iteration " + std::to_string(it) + ": pᵀAp = " + std::to_string(pq));
    }
    const double alpha = rz / pq;
    ops.for_chunks(n, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * q[i];
      }
    });
    const double rel = ops.norm2(r) / bnorm;
    out.residual_history.push_back(rel);
    out.iterations = it;
    if (rel < tol) {
      out.converged = true;
      break;
    }
    apply_ic_preconditioner(m, r, z, scratch, pool, &out.barrier_total);
    const double rz_next = ops.dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    ops.for_chunks(n, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) p[i] = z[i] + beta * p[i];
    });
  }
  return out;
}

// IccgSolver

struct IccgSolver::State {
  CgConfig cfg;
  std::unique_ptr<ThreadPool> pool;
  Index n = 0;
  Permutation perm;
  CsrMatrix a_ord;
  std::optional<SellMatrix> a_sell;
  IcPreconditioner m;
  std::vector<unsigned char> skip;
  Index n_colors = 0;
  Index n_dummies = 0;
  double setup_s = 0.0;
};

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

IccgSolver::IccgSolver(const CsrMatrix& a, const CgConfig& cfg) : s_(std::make_unique<State>()) {
  cfg.validate();
  if (a.diag_ptr.size() != static_cast<std::size_t>(a.n)) throw InvalidArgument("matrix must store every diagonal");
  const auto t0 = Clock::now();
  State& s = *s_;
  s.cfg = cfg;
  s.cfg.threads = cfg.threads ? cfg.threads : default_thread_count();
  s.pool = std::make_unique<ThreadPool>(s.cfg.threads);
  s.n = a.n;
  s.m.kind = cfg.ordering;

  switch (cfg.ordering) {
    case OrderingKind::natural:
      s.perm = Permutation::identity(a.n);
      s.a_ord = a;
      break;
    case OrderingKind::mc: {
      auto coloring = std::make_shared<NodalColoring>(greedy_color_nodes(a));
      s.perm = coloring->perm;
      s.n_colors = coloring->n_colors;
      s.a_ord = permute_matrix(a, s.perm);
      s.m.mc = std::move(coloring);
      break;
    }
    case OrderingKind::bmc: {
      auto layout = std::make_shared<BmcLayout>(build_bmc(a, cfg.block_size));
      s.perm = layout->perm;
      s.n_colors = layout->n_colors;
      s.a_ord = permute_matrix(a, s.perm);
      s.m.bmc = std::move(layout);
      break;
    }
    case OrderingKind::hbmc: {
      auto layout = std::make_shared<HbmcLayout>(build_hbmc(build_bmc(a, cfg.block_size), cfg.width));
      s.perm = layout->composed_perm;
      s.n_colors = layout->base.n_colors;
      s.n_dummies = layout->dummy_unknowns;
      s.a_ord = permute_matrix(append_identity(a, layout->dummy_unknowns), s.perm);
      s.skip = layout->is_dummy;
      s.m.hbmc = std::move(layout);
      break;
    }
  }

  s.m.factor = ic0_factorize(s.a_ord, cfg.shift, cfg.ordering);
  if (s.m.hbmc) s.m.sell = build_sell_factor(s.m.factor, *s.m.hbmc);
  if (cfg.format == SpmvFormat::sell) {
    s.a_sell = csr_to_sell(s.a_ord, cfg.ordering == OrderingKind::hbmc ? cfg.width : host_simd_width());
  }
  s.setup_s = seconds_since(t0);
}

IccgSolver::~IccgSolver() = default;
IccgSolver::IccgSolver(IccgSolver&&) noexcept = default;
IccgSolver& IccgSolver::operator=(IccgSolver&&) noexcept = default;

SolveReport IccgSolver::solve(std::span<const double> b, std::span<double> x) {
  State& s = *s_;
  if (b.size() != static_cast<std::size_t>(s.n) || x.size() != static_cast<std::size_t>(s.n))
    throw DimensionError("right-hand side or solution length does not match the matrix");
  const auto t0 = Clock::now();
  std::vector<double> b_ext(b.begin(), b.end());
  b_ext.resize(s.a_ord.n, 0.0);
  const std::vector<double> b_ord = s.perm.apply(b_ext);
  std::vector<double> x_ord(s.a_ord.n);
  const CgOutcome out = conjugate_gradient(s.a_ord, s.a_sell ? &*s.a_sell : nullptr, b_ord, x_ord, s.m, s.skip,
                                           s.cfg.tol, s.cfg.max_iters, *s.pool);
  for (Index i = 0; i < s.n; ++i) x[i] = x_ord[s.perm(i)];

  SolveReport r;
  r.time_solve_s = seconds_since(t0);
  r.time_setup_s = s.setup_s;
  r.ordering = s.cfg.ordering;
  r.block_size = s.cfg.ordering == OrderingKind::bmc || s.cfg.ordering == OrderingKind::hbmc ? s.cfg.block_size : 1;
  r.width = s.cfg.ordering == OrderingKind::hbmc ? s.cfg.width : 1;
  r.n_colors = s.n_colors;
  r.n = s.n;
  r.n_dummies = s.n_dummies;
  r.threads = s.pool->size();
  r.format = s.cfg.format;
  r.shift = s.cfg.shift;
  r.tol = s.cfg.tol;
  r.iterations = out.iterations;
  r.converged = out.converged;
  r.residual_history = out.residual_history;
  r.barrier_total = out.barrier_total;
  return r;
}

const CgConfig& IccgSolver::config() const noexcept { return s_->cfg; }
const IcPreconditioner& IccgSolver::preconditioner() const noexcept { return s_->m; }
const CsrMatrix& IccgSolver::ordered_matrix() const noexcept { return s_->a_ord; }
const Permutation& IccgSolver::ordering() const noexcept { return s_->perm; }
Index IccgSolver::n_colors() const noexcept { return s_->n_colors; }
Index IccgSolver::n_dummies() const noexcept { return s_->n_dummies; }
double IccgSolver::setup_seconds() const noexcept { return s_->setup_s; }
ThreadPool& IccgSolver::pool() noexcept { return *s_->pool; }

SolveReport pcg(const CsrMatrix& a, std::span<const double> b, const CgConfig& cfg, std::vector<double>& x) {
  IccgSolver solver(a, cfg);
  x.assign(a.n, 0.0);
  return solver.solve(b, x);
}

ConvergenceComparison compare_histories(const SolveReport& a, const SolveReport& b) {
  ConvergenceComparison c;
  c.iters_a = a.iterations;
  c.iters_b = b.iterations;
  const std::size_t common = std::min(a.residual_history.size(), b.residual_history.size());
  for (std::size_t j = 0; j < common; ++j) {
    const double x = a.residual_history[j], y = b.residual_history[j];
    const double scale = std::max(std::abs(x), std::abs(y));
    const double gap = scale == 0.0 ? 0.0 : std::abs(x - y) / scale;
    c.max_history_gap = std::max(c.max_history_gap, gap);
    if (j + 2 < common) c.max_gap_before_tail = std::max(c.max_gap_before_tail, gap);
  }
  c.report_a = a;
  c.report_b = b;
  return c;
}

ConvergenceComparison compare_convergence(const CsrMatrix& a, std::span<const double> b, const CgConfig& cfg_a,
                                          const CgConfig& cfg_b) {
  std::vector<double> x;
  const SolveReport ra = pcg(a, b, cfg_a, x);
  const SolveReport rb = pcg(a, b, cfg_b, x);
  return compare_histories(ra, rb);
}

std::vector<double> ones_rhs(const CsrMatrix& a) {
  return spmv(a, std::vector<double>(a.n, 1.0));
}

double relative_residual(const CsrMatrix& a, std::span<const double> x, std::span<const double> b) {
  const std::vector<double> ax = spmv(a, x);
  double rr = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    rr += (b[i] - ax[i]) * (b[i] - ax[i]);
    bb += b[i] * b[i];
  }
  return bb == 0.0 ? std::sqrt(rr) : std::sqrt(rr / bb);
}

// JSON

std::string report_to_json(const SolveReport& r, int indent) {
  nlohmann::ordered_json j;
  j["matrix"] = r.matrix;
  j["ordering"] = std::string(to_string(r.ordering));
  j["b_s"] = r.block_size;
  j["w"] = r.width;
  j["n_c"] = r.n_colors;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["time_setup_s"] = r.time_setup_s;
  j["time_solve_s"] = r.time_solve_s;
  j["residual_history"] = r.residual_history;
  j["n"] = r.n;
  j["n_dummies"] = r.n_dummies;
  j["threads"] = r.threads;
  j["format"] = std::string(to_string(r.format));
  j["shift"] = r.shift;
  j["tol"] = r.tol;
  j["barrier_total"] = r.barrier_total;
  return j.dump(indent);
}

SolveReport report_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed report JSON: ") + e.what());
  }
  SolveReport r;
  try {
    r.matrix = j.at("matrix").get<std::string>();
    r.ordering = parse_ordering(j.at("ordering").get<std::string>());
    r.block_size = j.at("b_s").get<Index>();
    r.width = j.at("w").get<Index>();
    r.n_colors = j.at("n_c").get<Index>();
    r.iterations = j.at("iterations").get<Index>();
    r.converged = j.at("converged").get<bool>();
    r.time_setup_s = j.at("time_setup_s").get<double>();
    r.time_solve_s = j.at("time_solve_s").get<double>();
    r.residual_history = j.at("residual_history").get<std::vector<double>>();
    r.n = j.value("n", Index{0});
    r.n_dummies = j.value("n_dummies", Index{0});
    r.threads = j.value("threads", std::size_t{1});
    r.format = parse_format(j.value("format", std::string("crs")));
    r.shift = j.value("shift", 0.0);
    r.tol = j.value("tol", 0.0);
    r.barrier_total = j.value("barrier_total", std::size_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("report JSON is missing a field: ") + e.what());
  }
  return r;
}

}  // namespace trilab
