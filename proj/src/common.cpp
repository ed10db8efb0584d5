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

#include "trilab/common.hpp"

#include <string>

namespace trilab {

std::string_view to_string(OrderingKind kind) noexcept {
  switch (kind) {
    case OrderingKind::natural: return "natural";
    case OrderingKind::mc: return "mc";
    case OrderingKind::bmc: return "bmc";
    case OrderingKind::hbmc: return "hbmc";
  }
  return "unknown";
}

OrderingKind parse_ordering(std::string_view name) {
  if (name == "natural") return OrderingKind::natural;
  if (name == "mc") return OrderingKind::mc;
  if (name == "bmc") return OrderingKind::bmc;
  if (name == "hbmc") return OrderingKind::hbmc;
  throw InvalidArgument("unknown ordering '" + std::string(name) + "'");
}

IngestError::IngestError(std::size_t line, const std::string& what)
    : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

BreakdownError::BreakdownError(Index row, double pivot, const std::string& what)
    : Error(what), row_(row), pivot_(pivot) {}

CgBreakdown::CgBreakdown(Index iteration, const std::string& what)
    : Error(what), iteration_(iteration) {}

}  // namespace trilab
