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

// Shared fixtures for the unit tests.

#ifndef DEXCORE_TESTS_HELPERS_HPP
#define DEXCORE_TESTS_HELPERS_HPP

#include <string>
#include <vector>

#include "dexcore/instances.hpp"
#include "dexcore/rng.hpp"

namespace dexcore::testing {

inline std::string data_path(const std::string& name) {
  return std::string(DEXCORE_TEST_DATA) + "/" + name;
}

// Two agents on a single shared road edge. Variance 1, four samples each,
// and free sharing unless a share cost is given.
inline RoadInstanceParams micro_road(double share_cost = 0.0) {
  RoadInstanceParams p;
  p.node_count = 2;
  p.edges = {{0, 1}};
  p.variance = {1.0};
  p.share_cost = {share_cost};
  p.paths = {{0, 1}, {1, 0}};
  p.samples = {{4}, {4}};
  p.agent_cost_scale = {1.0, 1.0};
  return p;
}

inline ExchangeMatrix random_exchange(std::size_t n, Rng& rng) {
  ExchangeMatrix x(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) x.set(i, j, rng.uniform());
  return x;
}

// Interior point: every share in [lo, 1 - lo].
inline ExchangeMatrix random_interior(std::size_t n, Rng& rng, double lo = 0.05) {
  ExchangeMatrix x(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) x.set(i, j, rng.uniform(lo, 1.0 - lo));
  return x;
}

// Certified families at test scale.
inline std::vector<Instance> certified_instances() {
  std::vector<Instance> out;
  out.push_back(make_road_instance(random_road_params(synthetic200(), 6, 11)));
  out.push_back(make_road_instance(micro_road(0.01)));
  out.push_back(make_hypergraph_gadget(load_hypergraph(data_path("two_edges.hg")), 1e-4));
  out.push_back(make_linear_instance({{0, 0.5, 0.2}, {0.3, 0, 0.7}, {0.4, 0.1, 0}},
                                     {{0, 0.1, 0.3}, {0.2, 0, 0.1}, {0.05, 0.2, 0}}));
  return out;
}

inline std::vector<Instance> all_instances() {
  auto out = certified_instances();
  out.push_back(make_counterexample(0.01));
  out.push_back(make_concave_cost_counterexample(0.01));
  out.push_back(make_convex_convex_counterexample(0.01));
  return out;
}

}  // namespace dexcore::testing

#endif  // DEXCORE_TESTS_HELPERS_HPP
