// Copyright 2026 The dexcore Authors
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

// Coalition/utility matrices and Scarf's pivoting algorithm.

#ifndef DEXCORE_SCARF_HPP
#define DEXCORE_SCARF_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dexcore/model.hpp"
#include "dexcore/oracle.hpp"

namespace dexcore {

struct ColumnInfo {
  std::optional<Coalition> coalition;      // empty for identity columns
  std::optional<ExchangeMatrix> witness;   // empty for identity columns
  std::vector<double> grid;      // grid utilities over members
  std::vector<double> achieved;  // witness utilities over members
};

struct MatrixPair {
  std::size_t n = 0;
  Eigen::MatrixXd C;  // n x m, identity block first
  Eigen::MatrixXd U;  // n x m
  std::vector<ColumnInfo> columns;
  double big_m = 0.0;
  QueryCounters counters;
  double build_seconds = 0.0;

  std::size_t m() const { return static_cast<std::size_t>(C.cols()); }

  /// Wraps raw matrices (tests, toy problems). The first n columns of C
  /// must be the identity; witnesses are all empty.
  static MatrixPair from_raw(Eigen::MatrixXd C, Eigen::MatrixXd U);
};

struct BuildConfig {
  std::size_t max_coalition = 3;
  OracleConfig oracle = OracleConfig::for_grid(0.1);
  std::size_t column_budget = 200'000;
  std::size_t threads = 0;  // 0: hardware concurrency
};

MatrixPair build_matrices(const Instance& inst, const BuildConfig& config);
MatrixPair build_matrices(const Instance& inst, std::size_t s, double epsilon);

struct PivotStep {
  char kind;  // 'c' cardinal, 'o' ordinal
  std::size_t entering;
  std::size_t leaving;
  bool operator==(const PivotStep&) const = default;
};

struct ScarfSolution {
  std::vector<std::size_t> basis;  // sorted column indices
  std::vector<double> delta;       // weight of basis[k]
  ExchangeMatrix exchange;
  std::size_t iterations = 0;
  double cardinal_seconds = 0.0;
  double ordinal_seconds = 0.0;
  std::vector<PivotStep> trace;
};

/// Returns (new basis, leaving column). Ratio ties are broken by the
/// lexicographic rule on the rows of [x | C_B^{-1}].
std::pair<std::vector<std::size_t>, std::size_t> cardinal_pivot(
    const MatrixPair& pair, std::span<const std::size_t> basis,
    std::size_t entering);

/// Returns (new ordinal basis, entering column).
std::pair<std::vector<std::size_t>, std::size_t> ordinal_pivot(
    const MatrixPair& pair, std::span<const std::size_t> basis,
    std::size_t leaving);

/// Throws ToleranceExceeded when the cap is hit; the default cap is 50 m.
ScarfSolution scarf_solve(const MatrixPair& pair, std::size_t iteration_cap = 0);

ExchangeMatrix assemble_exchange(const MatrixPair& pair,
                                 std::span<const std::size_t> basis,
                                 std::span<const double> delta);

/// C_B nonsingular with C_B^{-1} 1 >= -tol.
bool is_cardinal_basis(const MatrixPair& pair, std::span<const std::size_t> basis,
                       double tol = 1e-9);
/// Every column k has a row i with U[i,k] <= min over the basis of U[i,.].
bool is_ordinal_basis(const MatrixPair& pair, std::span<const std::size_t> basis);

/// max over columns k of min over agents i of (U[i,k] - u_i(x)). The
/// exchange is epsilon-core-stable at the matrix level when this is <= eps.
double certificate_gap(const MatrixPair& pair, const Instance& inst,
                       const ExchangeMatrix& x);

}  // namespace dexcore

#endif  // DEXCORE_SCARF_HPP
