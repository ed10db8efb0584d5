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

// tri-lab: command-line front end over the C API in trilab/trilab.h.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "trilab/trilab.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitUsage = 64;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Carries a trilab_status out of a helper.
struct ApiError : std::runtime_error {
  trilab_status status;
  ApiError(trilab_status s, const std::string& what) : std::runtime_error(what), status(s) {}
};

void check(trilab_status s, const std::string& context) {
  if (s != TRILAB_OK) throw ApiError(s, context + ": " + trilab_last_error());
}

struct MatrixDeleter {
  void operator()(trilab_matrix* m) const { trilab_matrix_free(m); }
};
struct LayoutDeleter {
  void operator()(trilab_layout* l) const { trilab_layout_free(l); }
};
struct ReportDeleter {
  void operator()(trilab_report* r) const { trilab_report_free(r); }
};
struct CheckDeleter {
  void operator()(trilab_check_result* r) const { trilab_check_free(r); }
};
using Matrix = std::unique_ptr<trilab_matrix, MatrixDeleter>;
using Layout = std::unique_ptr<trilab_layout, LayoutDeleter>;
using Report = std::unique_ptr<trilab_report, ReportDeleter>;
using CheckResult = std::unique_ptr<trilab_check_result, CheckDeleter>;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, sep)) out.push_back(part);
  return out;
}

long long to_int(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError(std::string("invalid ") + what + " '" + s + "'");
}

double to_real(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError(std::string("invalid ") + what + " '" + s + "'");
}

/// Generator specs: laplacian5pt NX NY | random N DENSITY SEED.
Matrix generate(const std::string& kind, const std::vector<std::string>& args) {
  trilab_matrix* m = nullptr;
  if (kind == "laplacian5pt") {
    if (args.size() != 2) throw UsageError("laplacian5pt takes NX NY");
    const auto nx = to_int(args[0], "NX"), ny = to_int(args[1], "NY");
    if (nx < 1 || ny < 1 || nx * ny > 2'000'000'000LL) throw UsageError("laplacian5pt needs NX, NY >= 1");
    check(trilab_matrix_laplacian5pt(static_cast<int32_t>(nx), static_cast<int32_t>(ny), &m), "gen");
  } else if (kind == "random") {
    if (args.size() != 3) throw UsageError("random takes N DENSITY SEED");
    const auto n = to_int(args[0], "N");
    const double density = to_real(args[1], "DENSITY");
    const auto seed = to_int(args[2], "SEED");
    if (n < 1 || n > 100'000'000LL) throw UsageError("random needs N >= 1");
    if (!(density >= 0.0 && density <= 1.0)) throw UsageError("DENSITY must lie in [0, 1]");
    check(trilab_matrix_random_spd(static_cast<int32_t>(n), density, static_cast<uint64_t>(seed), &m), "gen");
  } else {
    throw UsageError("unknown generator '" + kind + "', expected laplacian5pt or random");
  }
  return Matrix(m);
}

/// A path, or an inline generator spec such as laplacian5pt:64:64.
Matrix load_matrix(const std::string& source, bool use_cache) {
  if (source.empty()) throw UsageError("--matrix is required");
  const auto parts = split(source, ':');
  if (parts.size() > 1 && (parts[0] == "laplacian5pt" || parts[0] == "random")) {
    return generate(parts[0], {parts.begin() + 1, parts.end()});
  }
  trilab_matrix* m = nullptr;
  check(trilab_matrix_read(source.c_str(), use_cache ? 1 : 0, &m), "reading " + source);
  return Matrix(m);
}

struct SolverFlags {
  std::string ordering = "hbmc";
  int bs = 16;
  int w = 0;
  double shift = 0.0;
  double tol = 1e-7;
  int max_iters = 10000;
  std::string format = "crs";
  int threads = 0;
};

void add_solver_flags(CLI::App* app, SolverFlags& f) {
  app->add_option("--ordering", f.ordering, "natural, mc, bmc or hbmc")->capture_default_str();
  app->add_option("--bs", f.bs, "Block size b_s")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--w", f.w, "SIMD width w (0: host vector width)")->check(CLI::NonNegativeNumber);
  app->add_option("--shift", f.shift, "Diagonal shift of the IC factorization")->capture_default_str();
  app->add_option("--tol", f.tol, "Relative residual threshold")->capture_default_str();
  app->add_option("--max-iters", f.max_iters, "Iteration limit")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--format", f.format, "SpMV format: crs or sell")->capture_default_str();
  app->add_option("--threads", f.threads, "Threads (0: TRILAB_THREADS or logical cores)")
      ->check(CLI::NonNegativeNumber);
}

trilab_config make_config(const SolverFlags& f) {
  trilab_config c;
  trilab_config_default(&c);
  if (trilab_parse_ordering(f.ordering.c_str(), &c.ordering) != TRILAB_OK) throw UsageError(trilab_last_error());
  if (trilab_parse_format(f.format.c_str(), &c.format) != TRILAB_OK) throw UsageError(trilab_last_error());
  c.block_size = f.bs;
  c.width = f.w > 0 ? f.w : trilab_host_simd_width();
  c.shift = f.shift;
  c.tol = f.tol;
  c.max_iters = f.max_iters;
  c.threads = f.threads;
  return c;
}

// gen

int cmd_gen(const std::string& kind, const std::vector<std::string>& args, std::string out) {
  Matrix m = generate(kind, args);
  if (out.empty()) {
    out = kind;
    for (const auto& a : args) out += "_" + a;
    out += ".mtx";
  }
  check(trilab_matrix_write_mtx(m.get(), out.c_str()), "writing " + out);
  nlohmann::ordered_json meta;
  meta["generator"] = kind;
  meta["parameters"] = args;
  meta["n"] = trilab_matrix_dim(m.get());
  meta["nnz"] = trilab_matrix_nnz(m.get());
  meta["rhs"] = kind == "laplacian5pt" ? "ones" : "A*ones";
  std::ofstream side(out + ".json");
  if (!side) throw ApiError(TRILAB_ERR_IO, "cannot write " + out + ".json");
  side << meta.dump(2) << '\n';
  std::cout << "wrote " << out << " (n=" << trilab_matrix_dim(m.get()) << ", nnz=" << trilab_matrix_nnz(m.get())
            << ")\n";
  return kExitOk;
}

// reorder

int cmd_reorder(const std::string& source, bool use_cache, const SolverFlags& f, const std::string& emit) {
  Matrix m = load_matrix(source, use_cache);
  const trilab_config c = make_config(f);
  const int32_t n = trilab_matrix_dim(m.get());
  const bool blocked = c.ordering == TRILAB_ORDERING_BMC || c.ordering == TRILAB_ORDERING_HBMC;
  if (blocked && c.block_size > n) {
    std::cerr << "warning: b_s=" << c.block_size << " exceeds n=" << n << "; every node falls into one block\n";
  }
  trilab_layout* raw = nullptr;
  check(trilab_layout_build(m.get(), c.ordering, c.block_size, c.width, &raw), "reorder");
  Layout l(raw);

  const int32_t colors = trilab_layout_n_colors(l.get());
  std::cout << "matrix: " << source << " (n=" << n << ", nnz=" << trilab_matrix_nnz(m.get()) << ")\n";
  std::cout << "ordering: " << trilab_ordering_name(c.ordering);
  if (blocked) std::cout << "  b_s=" << c.block_size;
  if (c.ordering == TRILAB_ORDERING_HBMC) std::cout << "  w=" << c.width;
  std::cout << "\ncolors: " << colors << '\n';
  if (colors > 0) {
    std::ostringstream per, lv1;
    for (int32_t k = 0; k < colors; ++k) {
      int32_t members = 0, level1 = 0;
      check(trilab_layout_color_info(l.get(), k, &members, &level1), "reorder");
      per << (k ? " " : "") << members;
      lv1 << (k ? " " : "") << level1;
    }
    if (blocked) {
      std::cout << "blocks: " << trilab_layout_n_blocks(l.get()) << " (per color: " << per.str() << ")\n";
    } else {
      std::cout << "nodes per color: " << per.str() << '\n';
    }
    if (c.ordering == TRILAB_ORDERING_HBMC) {
      std::cout << "level-1 blocks per color: " << lv1.str() << '\n';
      std::cout << "dummies: " << trilab_layout_n_dummies(l.get()) << " unknowns ("
                << trilab_layout_n_dummy_blocks(l.get()) << " whole blocks)\n";
    }
  }
  if (c.ordering == TRILAB_ORDERING_HBMC) {
    std::size_t violations = 0;
    const bool holds = trilab_layout_er_holds(l.get(), &violations) != 0;
    std::cout << "ER condition: " << (holds ? "holds" : "violated (" + std::to_string(violations) + " pairs)")
              << '\n';
  }
  if (!emit.empty()) {
    check(trilab_layout_write(l.get(), emit.c_str()), "writing " + emit);
    std::cout << "layout written to " << emit << '\n';
  }
  return kExitOk;
}

// solve

int cmd_solve(const std::string& source, bool use_cache, const SolverFlags& f, const std::string& out) {
  Matrix m;
  trilab_config c;
  try {
    m = load_matrix(source, use_cache);
    c = make_config(f);
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  trilab_report* raw = nullptr;
  const trilab_status s = trilab_solve(m.get(), nullptr, &c, nullptr, &raw);
  if (s != TRILAB_OK) {
    std::cerr << "error: solve failed (" << trilab_status_name(s) << "): " << trilab_last_error() << '\n';
    return kExitFailure;
  }
  Report r(raw);
  trilab_report_set_matrix_name(r.get(), source.c_str());
  const std::string json = trilab_report_json(r.get(), 2);
  if (out.empty()) {
    std::cout << json << '\n';
  } else {
    std::ofstream file(out);
    if (!file) {
      std::cerr << "error: cannot write " << out << '\n';
      return kExitFailure;
    }
    file << json << '\n';
    std::cerr << "report written to " << out << '\n';
  }
  const bool converged = trilab_report_converged(r.get()) != 0;
  std::cerr << (converged ? "converged" : "not converged") << " after " << trilab_report_iterations(r.get())
            << " iterations\n";
  return converged ? kExitOk : kExitNotConverged;
}

// bench

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

std::string fmt_real(double v) {
  std::ostringstream s;
  s.precision(9);
  s << v;
  return s.str();
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string matrix_source_from_plan(const nlohmann::json& plan) {
  if (!plan.contains("matrix")) throw UsageError("plan has no \"matrix\" entry");
  const auto& m = plan["matrix"];
  if (m.is_string()) return m.get<std::string>();
  if (m.is_object()) {
    const std::string gen = m.value("generator", "");
    if (gen == "laplacian5pt")
      return "laplacian5pt:" + std::to_string(m.at("nx").get<int>()) + ":" + std::to_string(m.at("ny").get<int>());
    if (gen == "random")
      return "random:" + std::to_string(m.at("n").get<int>()) + ":" + fmt_real(m.at("density").get<double>()) + ":" +
             std::to_string(m.at("seed").get<long long>());
    throw UsageError("unknown generator '" + gen + "' in plan");
  }
  throw UsageError("\"matrix\" must be a path, a generator spec string or an object");
}

int cmd_bench(const std::string& plan_path, std::string out, int threads_flag, bool use_cache) {
  std::ifstream in(plan_path);
  if (!in) throw UsageError("cannot read plan " + plan_path);
  std::stringstream buf;
  buf << in.rdbuf();
  if (buf.str().find_first_not_of(" \t\r\n") == std::string::npos) throw UsageError("plan file is empty");
  nlohmann::json plan;
  try {
    plan = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("plan is not valid JSON: ") + e.what());
  }
  if (!plan.is_object()) throw UsageError("plan must be a JSON object");
  const auto configs = plan.value("configs", nlohmann::json::array());
  if (!configs.is_array() || configs.empty()) throw UsageError("plan lists no configs");
  const int reps = plan.value("repetitions", 1);
  const int warmup = plan.value("warmup", 0);
  if (reps < 1) throw UsageError("repetitions must be >= 1");
  if (warmup < 0) throw UsageError("warmup must be >= 0");
  if (out.empty()) out = plan.value("output", "");
  const int threads = threads_flag > 0 ? threads_flag : plan.value("threads", 0);

  const std::string source = matrix_source_from_plan(plan);
  Matrix m = load_matrix(source, use_cache || plan.value("cache", false));

  std::ofstream file;
  if (!out.empty()) {
    file.open(out);
    if (!file) throw ApiError(TRILAB_ERR_IO, "cannot write " + out);
  }
  std::ostream& csv = out.empty() ? std::cout : file;
  csv << "matrix,ordering,b_s,w,format,threads,rep,iterations,converged,setup_s,solve_s,time_per_iter_s,status,"
         "error\n";

  int failures = 0;
  for (const auto& jc : configs) {
    SolverFlags f;
    f.ordering = jc.value("ordering", f.ordering);
    f.bs = jc.value("b_s", f.bs);
    f.w = jc.value("w", f.w);
    f.format = jc.value("format", f.format);
    f.shift = jc.value("shift", plan.value("shift", f.shift));
    f.tol = jc.value("tol", plan.value("tol", f.tol));
    f.max_iters = jc.value("max_iters", plan.value("max_iters", f.max_iters));
    f.threads = threads;

    std::string prefix;
    trilab_config c{};
    std::string config_error;
    try {
      c = make_config(f);
    } catch (const std::exception& e) {
      config_error = e.what();
    }
    const int eff_threads = f.threads > 0 ? f.threads : trilab_default_threads();
    prefix = csv_field(source) + "," + csv_field(f.ordering) + "," + std::to_string(f.bs) + "," +
             std::to_string(config_error.empty() ? c.width : f.w) + "," + csv_field(f.format) + "," +
             std::to_string(eff_threads);

    std::vector<double> setup, solve, iters;
    int ok = 0;
    for (int rep = -warmup; rep < reps; ++rep) {
      std::string error = config_error;
      Report r;
      if (error.empty()) {
        trilab_report* raw = nullptr;
        const trilab_status s = trilab_solve(m.get(), nullptr, &c, nullptr, &raw);
        if (s == TRILAB_OK) {
          r.reset(raw);
        } else {
          error = std::string(trilab_status_name(s)) + ": " + trilab_last_error();
        }
      }
      if (rep < 0) continue;
      if (!r) {
        ++failures;
        csv << prefix << "," << rep << ",,,,,,error," << csv_field(error) << '\n';
        continue;
      }
      const int it = trilab_report_iterations(r.get());
      const double su = trilab_report_setup_seconds(r.get());
      const double so = trilab_report_solve_seconds(r.get());
      const bool conv = trilab_report_converged(r.get()) != 0;
      csv << prefix << "," << rep << "," << it << "," << (conv ? "true" : "false") << "," << fmt_real(su) << ","
          << fmt_real(so) << "," << fmt_real(it > 0 ? so / it : 0.0) << "," << (conv ? "ok" : "not_converged")
          << ",\n";
      setup.push_back(su);
      solve.push_back(so);
      iters.push_back(it);
      ++ok;
    }
    if (ok > 0) {
      const double mi = median(iters), ms = median(solve);
      csv << prefix << ",median," << fmt_real(mi) << ",," << fmt_real(median(setup)) << "," << fmt_real(ms) << ","
          << fmt_real(mi > 0 ? ms / mi : 0.0) << ",summary,\n";
    } else {
      csv << prefix << ",median,,,,,,error,no successful repetition\n";
    }
  }
  csv.flush();
  if (!out.empty()) std::cerr << "bench results written to " << out << '\n';
  return failures == 0 ? kExitOk : kExitFailure;
}

// check

int cmd_check(const std::string& source, bool use_cache, const std::vector<int>& bs, const std::vector<int>& w,
              const std::vector<int>& threads, double shift, bool corrupt) {
  Matrix m = load_matrix(source, use_cache);
  trilab_check_options o;
  trilab_check_options_default(&o);
  const std::vector<int32_t> bsv(bs.begin(), bs.end()), wv(w.begin(), w.end()), tv(threads.begin(), threads.end());
  o.block_sizes = bsv.data();
  o.n_block_sizes = bsv.size();
  o.widths = wv.data();
  o.n_widths = wv.size();
  if (!tv.empty()) {
    o.threads = tv.data();
    o.n_threads = tv.size();
  }
  o.shift = shift;
  o.corrupt_permutation = corrupt ? 1 : 0;
  trilab_check_result* raw = nullptr;
  check(trilab_check_run(m.get(), &o, &raw), "check");
  CheckResult r(raw);

  std::vector<std::string> failing;
  for (std::size_t i = 0; i < trilab_check_count(r.get()); ++i) {
    const char* property = nullptr;
    const char* detail = nullptr;
    int32_t b = 0, wi = 0;
    int passed = 0;
    check(trilab_check_item(r.get(), i, &property, &b, &wi, &passed, &detail), "check");
    std::cout << (passed ? "PASS " : "FAIL ") << property;
    if (b) std::cout << " b_s=" << b;
    if (wi) std::cout << " w=" << wi;
    std::cout << ": " << detail << '\n';
    if (!passed && std::find(failing.begin(), failing.end(), property) == failing.end()) failing.emplace_back(property);
  }
  if (failing.empty()) {
    std::cout << "check: all " << trilab_check_count(r.get()) << " properties passed\n";
    return kExitOk;
  }
  std::cout << "check: FAILED:";
  for (const auto& p : failing) std::cout << ' ' << p;
  std::cout << '\n';
  return kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tri-lab: HBMC ordering and IC(0)-CG laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(trilab_version()));

  std::string matrix;
  bool use_cache = false;
  SolverFlags flags;
  std::string out;

  auto* gen = app.add_subcommand("gen", "Generate a test matrix (laplacian5pt NX NY | random N DENSITY SEED)");
  std::string gen_kind;
  std::vector<std::string> gen_args;
  gen->add_option("generator", gen_kind, "laplacian5pt or random")->required();
  gen->add_option("params", gen_args, "Generator parameters");
  gen->add_option("--out", out, "Output .mtx path; metadata goes to <out>.json");

  auto* reorder = app.add_subcommand("reorder", "Build an ordering and print its summary");
  std::string emit;
  reorder->add_option("--matrix", matrix, "MatrixMarket path, CSR cache or laplacian5pt:NX:NY")->required();
  reorder->add_flag("--cache", use_cache, "Use <matrix>.csrbin as a parse cache");
  add_solver_flags(reorder, flags);
  reorder->add_option("--emit,--out", emit, "Write the layout text to this path");

  auto* solve = app.add_subcommand("solve", "Run IC(0)-preconditioned CG and print the JSON report");
  solve->add_option("--matrix", matrix, "MatrixMarket path, CSR cache or laplacian5pt:NX:NY")->required();
  solve->add_flag("--cache", use_cache, "Use <matrix>.csrbin as a parse cache");
  add_solver_flags(solve, flags);
  solve->add_option("--out", out, "Write the JSON report here instead of stdout");

  auto* bench = app.add_subcommand("bench", "Run a JSON benchmark plan and emit CSV");
  std::string plan;
  bench->add_option("plan", plan, "Plan file")->required();
  bench->add_option("--out", out, "CSV output path (overrides the plan)");
  bench->add_option("--threads", flags.threads, "Threads (0: plan value, TRILAB_THREADS or logical cores)")
      ->check(CLI::NonNegativeNumber);
  bench->add_flag("--cache", use_cache, "Use <matrix>.csrbin as a parse cache");

  auto* chk = app.add_subcommand("check", "Run the ordering/factor/kernel property suite");
  std::vector<int> check_bs{2, 4, 8}, check_w{2, 4, 8}, check_threads;
  double check_shift = 0.0;
  bool corrupt = false;
  chk->add_option("--matrix", matrix, "MatrixMarket path, CSR cache or laplacian5pt:NX:NY")->required();
  chk->add_flag("--cache", use_cache, "Use <matrix>.csrbin as a parse cache");
  chk->add_option("--bs", check_bs, "Block sizes, comma separated")->delimiter(',')->check(CLI::PositiveNumber);
  chk->add_option("--w", check_w, "Widths, comma separated")->delimiter(',')->check(CLI::PositiveNumber);
  chk->add_option("--threads", check_threads, "Thread counts, comma separated (default 1,2,4,8)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  chk->add_option("--shift", check_shift, "Diagonal shift");
  chk->add_flag("--corrupt-permutation", corrupt, "Test hook: break every HBMC secondary permutation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen(gen_kind, gen_args, out);
    if (*reorder) return cmd_reorder(matrix, use_cache, flags, emit);
    if (*solve) return cmd_solve(matrix, use_cache, flags, out);
    if (*bench) return cmd_bench(plan, out, flags.threads, use_cache);
    if (*chk) return cmd_check(matrix, use_cache, check_bs, check_w, check_threads, check_shift, corrupt);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
