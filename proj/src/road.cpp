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
#include <map>

#include "dexcore/errors.hpp"
#include "dexcore/instances.hpp"

namespace dexcore {

namespace {

// One edge of agent i's path as seen by i: the variance, i's own sample
// count, and the (agent, sample count) pairs of everyone else driving it.
struct SharedEdge {
  double variance;
  double own;
  std::vector<std::pair<std::size_t, double>> others;
};

}  // namespace

void RoadInstanceParams::validate() const {
  const std::size_t m = edges.size();
  if (variance.size() != m || share_cost.size() != m)
    throw InvalidArgument("road params need one variance and cost per edge");
  for (std::size_t e = 0; e < m; ++e) {
    if (!(variance[e] >= 0.0 && variance[e] <= 1.0))
      throw InvalidArgument("edge variance outside [0,1]");
    if (!(share_cost[e] >= 0.0))
      throw InvalidArgument("edge share cost must be nonnegative");
  }
  if (paths.empty()) throw InvalidArgument("road instance has no agents");
  if (samples.size() != paths.size() || agent_cost_scale.size() != paths.size())
    throw InvalidArgument("road params need samples and a cost scale per agent");
  const Graph g(node_count, edges);
  if (g.edge_count() != m)
    throw InvalidArgument("road graph edge list has duplicates");
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto& p = paths[i];
    if (p.size() < 2)
      throw InvalidArgument("agent " + std::to_string(i) + " has an empty path");
    if (samples[i].size() != p.size() - 1)
      throw InvalidArgument("agent " + std::to_string(i) +
                            " needs one sample count per path edge");
    auto sorted = p;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw InvalidArgument("agent " + std::to_string(i) +
                            " path revisits a node");
    for (std::size_t k = 0; k + 1 < p.size(); ++k) {
      if (!g.edge_id(p[k], p[k + 1]))
        throw InvalidArgument("agent " + std::to_string(i) +
                              " path uses a non-edge");
      if (samples[i][k] < 1)
        throw InvalidArgument("sample counts must be positive");
    }
    if (!(agent_cost_scale[i] >= 0.0))
      throw InvalidArgument("agent cost scale must be nonnegative");
  }
}

RoadInstanceParams random_road_params(const Graph& g, std::size_t agents,
                                      std::uint64_t seed) {
  if (agents == 0) throw InvalidArgument("need at least one agent");
  Rng rng(seed);
  RoadInstanceParams p;
  p.node_count = g.node_count();
  p.edges = g.edges();
  p.seed = seed;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const double sigma = rng.uniform();
    p.variance.push_back(sigma * sigma);
    p.share_cost.push_back((1.0 - sigma) * 1e-3);
  }
  for (std::size_t i = 0; i < agents; ++i) {
    auto path = sample_path(g, rng);
    std::vector<std::int64_t> z;
    for (std::size_t k = 0; k + 1 < path.size(); ++k)
      z.push_back(rng.uniform_int(4, 9));
    p.paths.push_back(std::move(path));
    p.samples.push_back(std::move(z));
    p.agent_cost_scale.push_back(1.0);
  }
  return p;
}

Instance make_road_instance(const RoadInstanceParams& params) {
  params.validate();
  const Graph g(params.node_count, params.edges);
  const std::size_t n = params.paths.size();

  // samples_on[i][edge id] = z_e^i for edges on P_i.
  std::vector<std::map<std::size_t, double>> samples_on(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = params.paths[i];
    for (std::size_t k = 0; k + 1 < p.size(); ++k)
      samples_on[i][*g.edge_id(p[k], p[k + 1])] =
          static_cast<double>(params.samples[i][k]);
  }

  std::vector<AgentUtility> agents;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<SharedEdge> shared;
    std::vector<double> price(n, 0.0);
    for (auto [e, zi] : samples_on[i]) {
      SharedEdge se{params.variance[e], zi, {}};
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        auto it = samples_on[j].find(e);
        if (it == samples_on[j].end()) continue;
        se.others.emplace_back(j, it->second);
        price[j] += params.agent_cost_scale[i] * params.share_cost[e] * zi;
      }
      if (!se.others.empty()) shared.push_back(std::move(se));
    }

    AgentUtility u;
    // sigma^2/z - sigma^2/(z + s) written as sigma^2 s / (z (z + s)) so the
    // empty exchange gives exactly zero.
    u.payoff = [shared](std::span<const double> in) {
      double total = 0.0;
      for (const auto& se : shared) {
        double s = 0.0;
        for (auto [j, zj] : se.others) s += in[j] * zj;
        total += se.variance * s / (se.own * (se.own + s));
      }
      return total;
    };
    u.payoff_supergradient = [shared](std::span<const double> in,
                                      std::span<double> g) {
      std::fill(g.begin(), g.end(), 0.0);
      for (const auto& se : shared) {
        double s = 0.0;
        for (auto [j, zj] : se.others) s += in[j] * zj;
        const double denom = (se.own + s) * (se.own + s);
        for (auto [j, zj] : se.others) g[j] += se.variance * zj / denom;
      }
    };
    u.cost = [price](std::span<const double> out) {
      double total = 0.0;
      for (std::size_t j = 0; j < price.size(); ++j) total += price[j] * out[j];
      return total;
    };
    u.cost_subgradient = [price](std::span<const double>, std::span<double> g) {
      std::copy(price.begin(), price.end(), g.begin());
    };
    u.concave_convex_certified = true;
    agents.push_back(std::move(u));
  }

  nlohmann::json doc = {
      {"family", "road"},
      {"params",
       {{"node_count", params.node_count},
        {"edges", params.edges},
        {"variance", params.variance},
        {"share_cost", params.share_cost},
        {"paths", params.paths},
        {"samples", params.samples},
        {"agent_cost_scale", params.agent_cost_scale},
        {"seed", params.seed}}}};
  const double bound = all_ones_payoff(agents);
  return Instance(std::move(agents), bound,
                  "road-n" + std::to_string(n), std::move(doc));
}

}  // namespace dexcore
