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

// Projected supergradient ascent over the shares of a coalition. Shared by
// the attainability oracle and the certified deviation search.

#ifndef DEXCORE_SRC_ASCENT_HPP
#define DEXCORE_SRC_ASCENT_HPP

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "dexcore/model.hpp"
#include "dexcore/oracle.hpp"

namespace dexcore::detail {

using PairList = std::vector<std::pair<std::size_t, std::size_t>>;

/// Ordered pairs (i, j), i != j, both in S; row-major.
PairList coalition_pairs(const Coalition& s);

/// Writes y[k] into x at pairs[k].
void scatter(const PairList& pairs, std::span<const double> y,
             ExchangeMatrix& x);

struct AscentProblem {
  PairList pairs;
  std::size_t n = 0;
  /// Objective at x; fills `grad` (one entry per pair) with a supergradient.
  std::function<double(const ExchangeMatrix& x, std::span<double> grad)> eval;
  /// Stop as soon as the objective reaches this value.
  double target = 0.0;
};

struct AscentResult {
  ExchangeMatrix best;
  double value = 0.0;
  std::size_t iterations = 0;
  bool reached_target = false;
};

/// Runs the ascent from each start in turn, keeping the best point seen.
AscentResult maximize(const AscentProblem& problem,
                      const std::vector<ExchangeMatrix>& starts,
                      const AscentConfig& config);

}  // namespace dexcore::detail

#endif  // DEXCORE_SRC_ASCENT_HPP
