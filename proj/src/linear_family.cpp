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

#include "dexcore/errors.hpp"
#include "dexcore/instances.hpp"

namespace dexcore {

// weight[j][i]: gain to i per unit of j's data; cost[i][j]: i's price for
// sending to j.
Instance make_linear_instance(const std::vector<std::vector<double>>& weight,
                              const std::vector<std::vector<double>>& cost) {
  const std::size_t n = weight.size();
  if (n == 0 || cost.size() != n)
    throw InvalidArgument("linear instance needs matching n x n weights");
  for (std::size_t i = 0; i < n; ++i) {
    if (weight[i].size() != n || cost[i].size() != n)
      throw InvalidArgument("linear instance rows must have length n");
    for (std::size_t j = 0; j < n; ++j)
      if (weight[i][j] < 0.0 || cost[i][j] < 0.0)
        throw InvalidArgument("linear weights must be nonnegative");
  }

  std::vector<AgentUtility> agents;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> w(n), c(n);
    for (std::size_t j = 0; j < n; ++j) {
      w[j] = j == i ? 0.0 : weight[j][i];
      c[j] = j == i ? 0.0 : cost[i][j];
    }
    AgentUtility u;
    u.payoff = [w](std::span<const double> in) {
      double s = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * in[j];
      return s;
    };
    u.cost = [c](std::span<const double> out) {
      double s = 0.0;
      for (std::size_t j = 0; j < c.size(); ++j) s += c[j] * out[j];
      return s;
    };
    u.payoff_supergradient = [w](std::span<const double>, std::span<double> g) {
      std::copy(w.begin(), w.end(), g.begin());
    };
    u.cost_subgradient = [c](std::span<const double>, std::span<double> g) {
      std::copy(c.begin(), c.end(), g.begin());
    };
    u.concave_convex_certified = true;
    agents.push_back(std::move(u));
  }
  nlohmann::json doc = {{"family", "linear"},
                        {"params", {{"weight", weight}, {"cost", cost}}}};
  const double bound = all_ones_payoff(agents);
  return Instance(std::move(agents), bound, "linear", std::move(doc));
}

}  // namespace dexcore
