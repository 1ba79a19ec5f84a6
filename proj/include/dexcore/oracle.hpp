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

// Coalition-level attainability: can the members of S reach a utility
// profile using only shares among themselves?

#ifndef DEXCORE_ORACLE_HPP
#define DEXCORE_ORACLE_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dexcore/model.hpp"

namespace dexcore {

struct AscentConfig {
  std::size_t iterations = 5000;
  double step = 0.5;        // c in the step c / sqrt(t)
  std::size_t stall = 1000;  // give up after this many non-improving steps
};

struct OracleConfig {
  double grid = 0.1;       // spacing of the utility grid
  double tolerance = 0.05;  // decision slack; grid / 2 unless overridden
  AscentConfig ascent;
  bool prune_dominated = true;
  /// Cap on the number of candidate grid vectors per coalition.
  std::size_t grid_budget = 2'000'000;

  static OracleConfig for_grid(double grid);
};

struct AttainabilityResult {
  bool attainable = false;
  std::optional<ExchangeMatrix> witness;
  std::optional<std::vector<double>> achieved;  // per member of S
};

/// Is the profile v (one entry per member of S) reachable within S?
/// Attainable answers carry a witness supported on S x S with
/// u_i >= max(v_i - tolerance, 0) for every member.
AttainabilityResult attainable(Oracle& oracle, const Coalition& s,
                               std::span<const double> v,
                               const OracleConfig& config);
AttainabilityResult attainable(const Instance& inst, const Coalition& s,
                               std::span<const double> v, double epsilon);

struct GridColumn {
  Coalition coalition;
  std::vector<double> utilities;  // multiples of the grid spacing
  std::vector<double> achieved;   // actual utilities of the witness
  ExchangeMatrix witness;
};

/// Attainable grid vectors of S, in descending lexicographic order.
/// Throws BudgetExceeded when the candidate grid is larger than the budget.
std::vector<GridColumn> enumerate_grid(Oracle& oracle, const Coalition& s,
                                       const OracleConfig& config);
std::vector<GridColumn> enumerate_grid(const Instance& inst, const Coalition& s,
                                       double epsilon);

/// Trims incoming shares until every member sits within epsilon above its
/// target. Throws PreconditionError when y exceeds the current utilities.
ExchangeMatrix reduce_to_profile(Oracle& oracle, const Coalition& s,
                                 const ExchangeMatrix& x,
                                 std::span<const double> y, double epsilon);
ExchangeMatrix reduce_to_profile(const Instance& inst, const Coalition& s,
                                 const ExchangeMatrix& x,
                                 std::span<const double> y, double epsilon);

}  // namespace dexcore

#endif  // DEXCORE_ORACLE_HPP
