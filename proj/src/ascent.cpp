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

#include "ascent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dexcore/errors.hpp"

namespace dexcore::detail {

PairList coalition_pairs(const Coalition& s) {
  PairList out;
  for (std::size_t a : s.members())
    for (std::size_t b : s.members())
      if (a != b) out.emplace_back(a, b);
  return out;
}

void scatter(const PairList& pairs, std::span<const double> y,
             ExchangeMatrix& x) {
  for (std::size_t k = 0; k < pairs.size(); ++k)
    x.set(pairs[k].first, pairs[k].second, y[k]);
}

AscentResult maximize(const AscentProblem& problem,
                      const std::vector<ExchangeMatrix>& starts,
                      const AscentConfig& config) {
  const std::size_t dim = problem.pairs.size();
  AscentResult result;
  result.best = ExchangeMatrix(problem.n);
  result.value = -std::numeric_limits<double>::infinity();
  std::vector<double> grad(dim), y(dim);
  ExchangeMatrix x(problem.n);

  for (const auto& start : starts) {
    for (std::size_t k = 0; k < dim; ++k)
      y[k] = start(problem.pairs[k].first, problem.pairs[k].second);
    std::size_t last_gain = 0;
    for (std::size_t t = 1; t <= config.iterations; ++t) {
      scatter(problem.pairs, y, x);
      std::fill(grad.begin(), grad.end(), 0.0);
      const double val = problem.eval(x, grad);
      ++result.iterations;
      if (!std::isfinite(val))
        throw ToleranceExceeded("ascent objective is not finite");
      if (val > result.value) {
        result.value = val;
        result.best = x;
        last_gain = t;
      }
      if (val >= problem.target) {
        result.reached_target = true;
        return result;
      }
      double norm = 0.0;
      for (double g : grad) norm += g * g;
      norm = std::sqrt(norm);
      // A zero supergradient certifies a maximum of a concave objective.
      if (norm == 0.0 || t - last_gain > config.stall) break;
      const double step = config.step / std::sqrt(static_cast<double>(t));
      for (std::size_t k = 0; k < dim; ++k)
        y[k] = std::clamp(y[k] + step * grad[k] / norm, 0.0, 1.0);
    }
  }
  return result;
}

}  // namespace dexcore::detail
