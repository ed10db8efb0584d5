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

#include "trilab/trilab.h"

#include <filesystem>
#include <fstream>
#include <new>
#include <optional>
#include <string>

#include "trilab/check.hpp"
#include "trilab/ordering.hpp"
#include "trilab/solver.hpp"

using namespace trilab;

struct trilab_matrix {
  CsrMatrix a;
  IngestStats stats;
  Index inserted_diagonals = 0;
};

struct trilab_layout {
  OrderingKind kind = OrderingKind::natural;
  Index n = 0;
  std::optional<NodalColoring> mc;
  std::optional<BmcLayout> bmc;
  std::optional<HbmcLayout> hbmc;
  ErReport er;
};

struct trilab_report {
  SolveReport r;
  std::string json;
};

struct trilab_check_result {
  CheckResult r;
};

namespace {

thread_local std::string g_last_error;

trilab_status fail(trilab_status s, const std::string& what) {
  g_last_error = what;
  return s;
}

template <typename F>
trilab_status guard(F&& f) noexcept {
  try {
    f();
    return TRILAB_OK;
  } catch (const IngestError& e) {
    return fail(TRILAB_ERR_PARSE, e.what());
  } catch (const InvalidArgument& e) {
    return fail(TRILAB_ERR_INVALID_ARGUMENT, e.what());
  } catch (const IoError& e) {
    return fail(TRILAB_ERR_IO, e.what());
  } catch (const DimensionError& e) {
    return fail(TRILAB_ERR_DIMENSION, e.what());
  } catch (const BreakdownError& e) {
    return fail(TRILAB_ERR_BREAKDOWN, e.what());
  } catch (const LayoutMismatch& e) {
    return fail(TRILAB_ERR_LAYOUT, e.what());
  } catch (const CgBreakdown& e) {
    return fail(TRILAB_ERR_CG_BREAKDOWN, e.what());
  } catch (const std::bad_alloc&) {
    return fail(TRILAB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TRILAB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(TRILAB_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw InvalidArgument(what);
}

OrderingKind to_kind(trilab_ordering o) {
  switch (o) {
    case TRILAB_ORDERING_NATURAL: return OrderingKind::natural;
    case TRILAB_ORDERING_MC: return OrderingKind::mc;
    case TRILAB_ORDERING_BMC: return OrderingKind::bmc;
    case TRILAB_ORDERING_HBMC: return OrderingKind::hbmc;
  }
  throw InvalidArgument("unknown ordering value");
}

trilab_ordering from_kind(OrderingKind k) {
  switch (k) {
    case OrderingKind::natural: return TRILAB_ORDERING_NATURAL;
    case OrderingKind::mc: return TRILAB_ORDERING_MC;
    case OrderingKind::bmc: return TRILAB_ORDERING_BMC;
    case OrderingKind::hbmc: return TRILAB_ORDERING_HBMC;
  }
  return TRILAB_ORDERING_NATURAL;
}

CgConfig to_config(const trilab_config& c) {
  CgConfig cfg;
  cfg.tol = c.tol;
  cfg.max_iters = c.max_iters;
  cfg.ordering = to_kind(c.ordering);
  cfg.block_size = c.block_size;
  cfg.width = c.width;
  cfg.shift = c.shift;
  require(c.threads >= 0, "threads must be >= 0");
  cfg.threads = static_cast<std::size_t>(c.threads);
  require(c.format == TRILAB_FORMAT_CRS || c.format == TRILAB_FORMAT_SELL, "unknown SpMV format value");
  cfg.format = c.format == TRILAB_FORMAT_SELL ? SpmvFormat::sell : SpmvFormat::crs;
  cfg.validate();
  return cfg;
}

trilab_matrix* wrap(CsrMatrix a) {
  auto* m = new trilab_matrix;
  m->a = std::move(a);
  return m;
}

bool cache_is_fresh(const std::filesystem::path& cache, const std::filesystem::path& source) {
  std::error_code ec;
  if (!std::filesystem::exists(cache, ec)) return false;
  const auto tc = std::filesystem::last_write_time(cache, ec);
  if (ec) return false;
  const auto ts = std::filesystem::last_write_time(source, ec);
  return !ec && tc >= ts;
}

}  // namespace

extern "C" {

const char* trilab_version(void) { return "0.1.0"; }
const char* trilab_last_error(void) { return g_last_error.c_str(); }

const char* trilab_status_name(trilab_status status) {
  switch (status) {
    case TRILAB_OK: return "ok";
    case TRILAB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TRILAB_ERR_IO: return "I/O error";
    case TRILAB_ERR_PARSE: return "parse error";
    case TRILAB_ERR_DIMENSION: return "dimension mismatch";
    case TRILAB_ERR_BREAKDOWN: return "IC breakdown";
    case TRILAB_ERR_LAYOUT: return "layout mismatch";
    case TRILAB_ERR_CG_BREAKDOWN: return "CG breakdown";
    case TRILAB_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

int32_t trilab_host_simd_width(void) { return host_simd_width(); }
int32_t trilab_default_threads(void) { return static_cast<int32_t>(default_thread_count()); }

trilab_status trilab_parse_ordering(const char* name, trilab_ordering* out) {
  return guard([&] {
    require(name && out, "null argument");
    *out = from_kind(parse_ordering(name));
  });
}

trilab_status trilab_parse_format(const char* name, trilab_format* out) {
  return guard([&] {
    require(name && out, "null argument");
    *out = parse_format(name) == SpmvFormat::sell ? TRILAB_FORMAT_SELL : TRILAB_FORMAT_CRS;
  });
}

const char* trilab_ordering_name(trilab_ordering ordering) {
  try {
    return to_string(to_kind(ordering)).data();
  } catch (...) {
    return "unknown";
  }
}

// Matrices

trilab_status trilab_matrix_read(const char* path, int use_cache, trilab_matrix** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = nullptr;
    const std::filesystem::path p(path);
    if (!std::filesystem::exists(p)) throw IoError("cannot open '" + p.string() + "'");
    if (is_csr_cache(p)) {
      *out = wrap(read_csr_cache(p));
      return;
    }
    std::filesystem::path cache = p;
    cache += ".csrbin";
    if (use_cache && cache_is_fresh(cache, p) && is_csr_cache(cache)) {
      *out = wrap(read_csr_cache(cache));
      return;
    }
    const CooMatrix coo = read_matrix_market(p);
    auto m = std::make_unique<trilab_matrix>();
    m->a = coo_to_csr(coo, &m->inserted_diagonals);
    m->stats = coo.stats;
    if (use_cache) {
      try {
        write_csr_cache(m->a, cache);
      } catch (const IoError&) {
        // The cache is an optimization only.
      }
    }
    *out = m.release();
  });
}

trilab_status trilab_matrix_laplacian5pt(int32_t nx, int32_t ny, trilab_matrix** out) {
  return guard([&] {
    require(out, "null argument");
    *out = wrap(gen_laplacian_5pt(nx, ny).a);
  });
}

trilab_status trilab_matrix_random_spd(int32_t n, double density, uint64_t seed, trilab_matrix** out) {
  return guard([&] {
    require(out, "null argument");
    *out = wrap(gen_random_spd(n, density, seed));
  });
}

trilab_status trilab_matrix_from_triplets(int32_t n, size_t count, const int32_t* rows, const int32_t* cols,
                                          const double* values, trilab_matrix** out) {
  return guard([&] {
    require(out && (count == 0 || (rows && cols && values)), "null argument");
    require(n >= 0, "dimension must be >= 0");
    CooMatrix coo;
    coo.n = n;
    coo.entries.reserve(count);
    for (size_t k = 0; k < count; ++k) {
      if (rows[k] < 0 || rows[k] >= n || cols[k] < 0 || cols[k] >= n)
        throw DimensionError("triplet " + std::to_string(k) + " lies outside the matrix");
      coo.entries.push_back({rows[k], cols[k], values[k]});
    }
    auto m = std::make_unique<trilab_matrix>();
    m->a = coo_to_csr(coo, &m->inserted_diagonals);
    *out = m.release();
  });
}

trilab_status trilab_matrix_write_mtx(const trilab_matrix* m, const char* path) {
  return guard([&] {
    require(m && path, "null argument");
    write_matrix_market(m->a, path);
  });
}

trilab_status trilab_matrix_write_cache(const trilab_matrix* m, const char* path) {
  return guard([&] {
    require(m && path, "null argument");
    write_csr_cache(m->a, path);
  });
}

int32_t trilab_matrix_dim(const trilab_matrix* m) { return m ? m->a.n : 0; }
int64_t trilab_matrix_nnz(const trilab_matrix* m) { return m ? m->a.nnz() : 0; }

void trilab_matrix_ingest_stats(const trilab_matrix* m, size_t* dropped_zeros, size_t* merged_duplicates,
                                int32_t* inserted_diagonals) {
  if (dropped_zeros) *dropped_zeros = m ? m->stats.dropped_zeros : 0;
  if (merged_duplicates) *merged_duplicates = m ? m->stats.merged_duplicates : 0;
  if (inserted_diagonals) *inserted_diagonals = m ? m->inserted_diagonals : 0;
}

trilab_status trilab_matrix_spmv(const trilab_matrix* m, const double* x, double* y) {
  return guard([&] {
    require(m && x && y, "null argument");
    const auto n = static_cast<std::size_t>(m->a.n);
    spmv(m->a, std::span<const double>(x, n), std::span<double>(y, n));
  });
}

void trilab_matrix_free(trilab_matrix* m) { delete m; }

// Layouts

trilab_status trilab_layout_build(const trilab_matrix* m, trilab_ordering ordering, int32_t block_size,
                                  int32_t width, trilab_layout** out) {
  return guard([&] {
    require(m && out, "null argument");
    auto l = std::make_unique<trilab_layout>();
    l->kind = to_kind(ordering);
    l->n = m->a.n;
    switch (l->kind) {
      case OrderingKind::natural:
        l->er = check_er_condition(m->a, Permutation::identity(m->a.n));
        break;
      case OrderingKind::mc:
        l->mc = greedy_color_nodes(m->a);
        l->er = check_er_condition(m->a, l->mc->perm);
        break;
      case OrderingKind::bmc:
        l->bmc = build_bmc(m->a, block_size);
        l->er = check_er_condition(m->a, l->bmc->perm);
        break;
      case OrderingKind::hbmc:
        l->hbmc = build_hbmc(build_bmc(m->a, block_size), width);
        l->er = check_er_condition(bmc_extended_matrix(m->a, *l->hbmc), l->hbmc->perm);
        break;
    }
    *out = l.release();
  });
}

trilab_ordering trilab_layout_ordering(const trilab_layout* l) {
  return l ? from_kind(l->kind) : TRILAB_ORDERING_NATURAL;
}

int32_t trilab_layout_n_colors(const trilab_layout* l) {
  if (!l) return 0;
  if (l->mc) return l->mc->n_colors;
  if (l->bmc) return l->bmc->n_colors;
  if (l->hbmc) return l->hbmc->base.n_colors;
  return 0;
}

int32_t trilab_layout_n_blocks(const trilab_layout* l) {
  if (!l) return 0;
  if (l->bmc) return l->bmc->blocking.n_blocks();
  if (l->hbmc) return l->hbmc->base.blocking.n_blocks();
  return 0;
}

int32_t trilab_layout_n_dummies(const trilab_layout* l) { return l && l->hbmc ? l->hbmc->dummy_unknowns : 0; }
int32_t trilab_layout_n_dummy_blocks(const trilab_layout* l) { return l && l->hbmc ? l->hbmc->dummy_blocks : 0; }

trilab_status trilab_layout_color_info(const trilab_layout* l, int32_t color, int32_t* members,
                                       int32_t* level1_blocks) {
  return guard([&] {
    require(l, "null argument");
    if (color < 0 || color >= trilab_layout_n_colors(l)) throw InvalidArgument("color out of range");
    int32_t mem = 0, lv1 = 0;
    if (l->mc) mem = l->mc->color_ptr[color + 1] - l->mc->color_ptr[color];
    if (l->bmc) mem = l->bmc->blocks_per_color[color];
    if (l->hbmc) {
      mem = l->hbmc->base.blocks_per_color[color];
      lv1 = l->hbmc->level1_per_color[color];
    }
    if (members) *members = mem;
    if (level1_blocks) *level1_blocks = lv1;
  });
}

int trilab_layout_er_holds(const trilab_layout* l, size_t* violations) {
  if (!l) return 0;
  if (violations) *violations = l->er.violation_count;
  return l->er.holds ? 1 : 0;
}

trilab_status trilab_layout_write(const trilab_layout* l, const char* path) {
  return guard([&] {
    require(l && path, "null argument");
    std::ofstream out(path);
    if (!out) throw IoError(std::string("cannot write '") + path + "'");
    if (l->mc) {
      write_layout(out, *l->mc);
    } else if (l->bmc) {
      write_layout(out, *l->bmc);
    } else if (l->hbmc) {
      write_layout(out, *l->hbmc);
    } else {
      out << "# tri-lab layout v1\n# ordering natural\n# n " << l->n
          << "\n# columns: original color block level1 position\n";
      for (Index i = 0; i < l->n; ++i) out << i << " 0 -1 -1 " << i << '\n';
    }
    if (!out) throw IoError(std::string("write failed for '") + path + "'");
  });
}

void trilab_layout_free(trilab_layout* l) { delete l; }

// Solver

void trilab_config_default(trilab_config* cfg) {
  if (!cfg) return;
  const CgConfig d;
  cfg->tol = d.tol;
  cfg->max_iters = d.max_iters;
  cfg->ordering = from_kind(d.ordering);
  cfg->block_size = d.block_size;
  cfg->width = d.width;
  cfg->shift = d.shift;
  cfg->threads = 0;
  cfg->format = TRILAB_FORMAT_CRS;
}

trilab_status trilab_solve(const trilab_matrix* m, const double* b, const trilab_config* cfg, double* x,
                           trilab_report** out) {
  return guard([&] {
    require(m && cfg && out, "null argument");
    *out = nullptr;
    const CgConfig c = to_config(*cfg);
    const auto n = static_cast<std::size_t>(m->a.n);
    const std::vector<double> rhs = b ? std::vector<double>(b, b + n) : ones_rhs(m->a);
    std::vector<double> sol;
    auto r = std::make_unique<trilab_report>();
    r->r = pcg(m->a, rhs, c, sol);
    if (x) std::copy(sol.begin(), sol.end(), x);
    *out = r.release();
  });
}

void trilab_report_set_matrix_name(trilab_report* r, const char* name) {
  if (r) r->r.matrix = name ? name : "";
}

int32_t trilab_report_iterations(const trilab_report* r) { return r ? r->r.iterations : 0; }
int trilab_report_converged(const trilab_report* r) { return r && r->r.converged ? 1 : 0; }
int32_t trilab_report_n_colors(const trilab_report* r) { return r ? r->r.n_colors : 0; }
int32_t trilab_report_n_dummies(const trilab_report* r) { return r ? r->r.n_dummies : 0; }
int64_t trilab_report_barrier_total(const trilab_report* r) {
  return r ? static_cast<int64_t>(r->r.barrier_total) : 0;
}
double trilab_report_setup_seconds(const trilab_report* r) { return r ? r->r.time_setup_s : 0.0; }
double trilab_report_solve_seconds(const trilab_report* r) { return r ? r->r.time_solve_s : 0.0; }
size_t trilab_report_history_length(const trilab_report* r) { return r ? r->r.residual_history.size() : 0; }

double trilab_report_history(const trilab_report* r, size_t j) {
  if (!r || j >= r->r.residual_history.size()) return 0.0;
  return r->r.residual_history[j];
}

const char* trilab_report_json(trilab_report* r, int indent) {
  if (!r) return "";
  try {
    r->json = report_to_json(r->r, indent);
  } catch (...) {
    r->json.clear();
  }
  return r->json.c_str();
}

void trilab_report_free(trilab_report* r) { delete r; }

// Checks

void trilab_check_options_default(trilab_check_options* o) {
  static const int32_t kSizes[] = {2, 4, 8};
  if (!o) return;
  o->block_sizes = kSizes;
  o->n_block_sizes = 3;
  o->widths = kSizes;
  o->n_widths = 3;
  o->threads = nullptr;
  o->n_threads = 0;
  o->shift = 0.0;
  o->seed = 1;
  o->corrupt_permutation = 0;
}

trilab_status trilab_check_run(const trilab_matrix* m, const trilab_check_options* o, trilab_check_result** out) {
  return guard([&] {
    require(m && o && out, "null argument");
    require(o->n_block_sizes == 0 || o->block_sizes, "null block size list");
    require(o->n_widths == 0 || o->widths, "null width list");
    CheckOptions opt;
    opt.block_sizes.assign(o->block_sizes, o->block_sizes + o->n_block_sizes);
    opt.widths.assign(o->widths, o->widths + o->n_widths);
    if (o->threads && o->n_threads) {
      opt.threads.clear();
      for (size_t k = 0; k < o->n_threads; ++k) {
        require(o->threads[k] >= 1, "thread counts must be >= 1");
        opt.threads.push_back(static_cast<std::size_t>(o->threads[k]));
      }
    }
    for (Index bs : opt.block_sizes) require(bs >= 1, "block sizes must be >= 1");
    for (Index w : opt.widths) require(w >= 1, "widths must be >= 1");
    opt.shift = o->shift;
    opt.seed = o->seed;
    opt.corrupt_permutation = o->corrupt_permutation != 0;
    auto r = std::make_unique<trilab_check_result>();
    r->r = run_check_suite(m->a, opt);
    *out = r.release();
  });
}

int trilab_check_passed(const trilab_check_result* r) { return r && r->r.passed() ? 1 : 0; }
size_t trilab_check_count(const trilab_check_result* r) { return r ? r->r.items.size() : 0; }

trilab_status trilab_check_item(const trilab_check_result* r, size_t i, const char** property, int32_t* block_size,
                                int32_t* width, int* passed, const char** detail) {
  return guard([&] {
    require(r, "null argument");
    if (i >= r->r.items.size()) throw InvalidArgument("check item index out of range");
    const CheckItem& it = r->r.items[i];
    if (property) *property = it.property.c_str();
    if (block_size) *block_size = it.block_size;
    if (width) *width = it.width;
    if (passed) *passed = it.passed ? 1 : 0;
    if (detail) *detail = it.detail.c_str();
  });
}

void trilab_check_free(trilab_check_result* r) { delete r; }

}  // extern "C"
