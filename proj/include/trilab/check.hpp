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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "trilab/precond.hpp"

namespace trilab {

struct CheckOptions {
  std::vector<Index> block_sizes{2, 4, 8};
  std::vector<Index> widths{2, 4, 8};
  std::vector<std::size_t> threads{1, 2, 4, 8};
  double shift = 0.0;
  double kernel_tolerance = 1e-14;
  double factor_tolerance = 1e-12;
  std::uint64_t seed = 1;
  /// Test hook: reverse one coupled pair in every HBMC secondary permutation.
  bool corrupt_permutation = false;
};

struct CheckItem {
  std::string property;
  Index block_size = 0;  // 0 when the property does not depend on it
  Index width = 0;
  bool passed = false;
  std::string detail;
};

struct CheckResult {
  std::vector<CheckItem> items;

  bool passed() const noexcept;
  /// Distinct names of failing properties, in first-failure order.
  std::vector<std::string> failing_properties() const;
};

/// Property names: er_condition, level2_structure, ic0_residual, ic0_pattern,
/// factor_equivalence, kernel_oracle_{mc,bmc,hbmc}, hbmc_thread_determinism,
/// barrier_contract_{mc,bmc,hbmc}.
CheckResult run_check_suite(const CsrMatrix& a, const CheckOptions& options);

/// max_i |u_i - v_i| / max(|u_i|, |v_i|), entries where both are 0 skipped.
double max_relative_error(std::span<const double> u, std::span<const double> v);

}  // namespace trilab
