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

#include <algorithm>
#include <cmath>

#include "dexcore/errors.hpp"
#include "dexcore/instances.hpp"

namespace dexcore {

namespace {

using Weights = std::array<std::array<double, 3>, 3>;

// The two agents other than i, ascending.
std::pair<std::size_t, std::size_t> others(std::size_t i) {
  switch (i) {
    case 0: return {1, 2};
    case 1: return {0, 2};
    default: return {0, 1};
  }
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.25))
    throw InvalidArgument("counterexample epsilon must lie in (0, 1/4)");
}

nlohmann::json weights_json(const Weights& w) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : w) out.push_back(row);
  return out;
}

// (p/eps)(x - (1 - eps))_+ summed over the two incoming edges.
ShareFunction threshold_payoff(std::size_t i, Weights payoff, double eps) {
  const auto [a, b] = others(i);
  return [=](std::span<const double> in) {
    const double lo = 1.0 - eps;
    return payoff[a][i] / eps * std::max(in[a] - lo, 0.0) +
           payoff[b][i] / eps * std::max(in[b] - lo, 0.0);
  };
}

ShareFunction linear_payoff(std::size_t i, Weights payoff) {
  const auto [a, b] = others(i);
  return [=](std::span<const double> in) {
    return payoff[a][i] * in[a] + payoff[b][i] * in[b];
  };
}

}  // namespace

CounterexampleParams CounterexampleParams::derived(double epsilon) {
  check_epsilon(epsilon);
  CounterexampleParams p;
  p.epsilon = epsilon;
  auto& P = p.payoff;
  auto& C = p.cost;
  P[0][1] = 0.25;  C[0][1] = 0.25;
  P[1][0] = 0.5;   C[1][0] = 0.125;
  P[0][2] = 0.5;   C[0][2] = 0.625;
  P[2][0] = 0.75;  C[2][0] = 0.25;
  P[1][2] = 0.125; C[1][2] = 0.125;
  P[2][1] = 0.375; C[2][1] = 0.0;
  return p;
}

Instance make_counterexample(double epsilon) {
  return make_counterexample(CounterexampleParams::derived(epsilon));
}

Instance make_counterexample(const CounterexampleParams& params) {
  const double eps = params.epsilon;
  check_epsilon(eps);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j && (params.payoff[i][j] < 0.0 || params.cost[i][j] < 0.0))
        throw InvalidArgument("counterexample weights must be nonnegative");

  std::vector<AgentUtility> agents;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto [a, b] = others(i);
    const auto cost = params.cost;
    AgentUtility u;
    u.payoff = threshold_payoff(i, params.payoff, eps);
    u.cost = [=](std::span<const double> out) {
      return cost[i][a] * out[a] + cost[i][b] * out[b] + out[a] * out[b] / eps;
    };
    agents.push_back(std::move(u));
  }
  nlohmann::json doc = {{"family", "counterexample"},
                        {"params",
                         {{"epsilon", eps},
                          {"payoff", weights_json(params.payoff)},
                          {"cost", weights_json(params.cost)}}}};
  const double bound = all_ones_payoff(agents);
  return Instance(std::move(agents), bound, "counterexample", std::move(doc));
}

Instance make_concave_cost_counterexample(double epsilon, double cap) {
  check_epsilon(epsilon);
  if (cap <= 0.0) cap = 100.0 / epsilon;
  const auto params = CounterexampleParams::derived(epsilon);
  const double eps = epsilon;
  const double big = cap;

  std::vector<AgentUtility> agents;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto [a, b] = others(i);
    const double ca = params.cost[i][a];
    const double cb = params.cost[i][b];
    if (big < std::max(ca, cb))
      throw InvalidArgument("cap must dominate the linear share costs");
    AgentUtility u;
    u.payoff = linear_payoff(i, params.payoff);
    // Lower envelope of the planes through the corner points (0,0,0),
    // (eps,0,ca), (0,eps,cb), (eps,eps,C) and the plateaus ca, cb, C.
    u.cost = [=](std::span<const double> out) {
      const double xa = out[a], xb = out[b];
      return std::min({ca * xa / eps + (big - ca) * xb / eps,
                       (big - cb) * xa / eps + cb * xb / eps,
                       ca + (big - ca) * xb / eps,
                       cb + (big - cb) * xa / eps, big});
    };
    agents.push_back(std::move(u));
  }
  nlohmann::json doc = {{"family", "concave-cost"},
                        {"params", {{"epsilon", eps}, {"cap", big}}}};
  const double bound = all_ones_payoff(agents);
  return Instance(std::move(agents), bound, "concave-cost", std::move(doc));
}

Instance make_convex_convex_counterexample(double epsilon) {
  check_epsilon(epsilon);
  const auto params = CounterexampleParams::derived(epsilon);
  const double eps = epsilon;

  std::vector<AgentUtility> agents;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto [a, b] = others(i);
    const double ca = params.cost[i][a];
    const double cb = params.cost[i][b];
    AgentUtility u;
    u.payoff = threshold_payoff(i, params.payoff, eps);
    u.cost = [=](std::span<const double> out) {
      return std::max(out[a] + out[b] - 1.0, 0.0) / eps + ca * out[a] +
             cb * out[b];
    };
    agents.push_back(std::move(u));
  }
  nlohmann::json doc = {{"family", "convex-convex"},
                        {"params", {{"epsilon", eps}}}};
  const double bound = all_ones_payoff(agents);
  return Instance(std::move(agents), bound, "convex-convex", std::move(doc));
}

}  // namespace dexcore
