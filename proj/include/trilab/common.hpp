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
#include <stdexcept>
#include <string>
#include <string_view>

namespace trilab {

/// Row/column index. 32-bit so SELL gathers can use packed 32-bit offsets.
using Index = std::int32_t;
/// Position inside a packed value array.
using Offset = std::int64_t;

enum class OrderingKind { natural, mc, bmc, hbmc };

std::string_view to_string(OrderingKind kind) noexcept;
OrderingKind parse_ordering(std::string_view name);

/// Base of every error the library throws. The C API maps each subclass onto
/// its own status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// MatrixMarket or cache parse failure; line() is 1-based, 0 when unknown.
class IngestError : public Error {
 public:
  IngestError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Non-positive IC pivot or zero diagonal in a triangular factor.
class BreakdownError : public Error {
 public:
  BreakdownError(Index row, double pivot, const std::string& what);
  Index row() const noexcept { return row_; }
  double pivot() const noexcept { return pivot_; }

 private:
  Index row_;
  double pivot_;
};

/// A kernel was handed a factor built under a different ordering/layout.
class LayoutMismatch : public Error {
 public:
  using Error::Error;
};

/// CG search direction with non-positive curvature.
class CgBreakdown : public Error {
 public:
  CgBreakdown(Index iteration, const std::string& what);
  Index iteration() const noexcept { return iteration_; }

 private:
  Index iteration_;
};

}  // namespace trilab
