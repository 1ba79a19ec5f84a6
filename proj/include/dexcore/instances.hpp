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

#ifndef DEXCORE_INSTANCES_HPP
#define DEXCORE_INSTANCES_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dexcore/model.hpp"
#include "dexcore/rng.hpp"

namespace dexcore {

// ---------------------------------------------------------------------------
// Three-agent counterexamples (no core-stable exchange exists).

/// Per-directed-edge weights of the three-agent triangle. payoff[j][i] is
/// what agent i gains from receiving j's full data; cost[i][j] is what
/// agent i pays to share everything with j. Diagonals are unused.
struct CounterexampleParams {
  double epsilon = 0.01;
  std::array<std::array<double, 3>, 3> payoff{};
  std::array<std::array<double, 3>, 3> cost{};

  /// Weights fixed by p(0->1) = c(0->1) = 1/4 together with the utilities
  /// required in every case of the blocking table; the remaining free
  /// parameter is set to the smallest nonnegative multiple of 1/8.
  static CounterexampleParams derived(double epsilon);
};

/// Threshold payoff (p/eps)(x - (1-eps))_+ per incoming edge, cost linear
/// plus the (1/eps) x_a x_b cross term. Not concave/convex certified.
Instance make_counterexample(double epsilon);
Instance make_counterexample(const CounterexampleParams& params);

/// Linear payoffs and concave piecewise-planar costs capped at `cap`
/// (default 100/epsilon when cap <= 0).
Instance make_concave_cost_counterexample(double epsilon, double cap = 0.0);

/// Threshold payoffs (convex) with the convex cost
/// (1/eps)(x_a + x_b - 1)_+ + linear terms.
Instance make_convex_convex_counterexample(double epsilon);

// ---------------------------------------------------------------------------
// Linear toy family (handy for tests and small experiments).

/// p_i = sum_j weight[j][i] x_{j,i}, c_i = sum_j cost[i][j] x_{i,j}.
Instance make_linear_instance(const std::vector<std::vector<double>>& weight,
                              const std::vector<std::vector<double>>& cost);

// ---------------------------------------------------------------------------
// Hypergraph matching gadget.

/// Hypergraph with size-3 edges, vertex degree at most 3, and a strict
/// preference order over each vertex's incident edges (most preferred
/// first).
struct Hypergraph {
  std::size_t vertex_count = 0;
  std::vector<std::array<std::size_t, 3>> edges;
  std::vector<std::vector<std::size_t>> preferences;

  /// Throws InvalidArgument when an invariant is violated.
  void validate() const;
  /// Edges incident to v, in edge-index order.
  std::vector<std::size_t> incident(std::size_t v) const;
  /// 0 for v's favourite incident edge, 1 for the next, ...
  std::size_t rank(std::size_t v, std::size_t e) const;

  /// Preferences default to incident edges in index order.
  static Hypergraph with_default_preferences(
      std::size_t vertex_count, std::vector<std::array<std::size_t, 3>> edges);
};

/// Text form: `vertices N`, then `edge a b c` lines, then optional
/// `pref v e1 e2 ...` lines. `#` starts a comment.
Hypergraph parse_hypergraph(std::istream& in);
Hypergraph load_hypergraph(const std::filesystem::path& path);

/// Agent numbering inside a gadget instance: vertex agents first, then one
/// edge agent per hyperedge, then one intermediate agent per hyperedge.
struct GadgetLayout {
  std::size_t vertex_count = 0;
  std::size_t edge_count = 0;

  std::size_t vertex_agent(std::size_t v) const { return v; }
  std::size_t edge_agent(std::size_t e) const { return vertex_count + e; }
  std::size_t intermediate_agent(std::size_t e) const {
    return vertex_count + edge_count + e;
  }
  std::size_t agent_count() const { return vertex_count + 2 * edge_count; }
};

struct GadgetConstants {
  double epsilon;
  double d;      // eps^{-1/4}
  double h;      // eps^{-1/2}
  double gamma;  // 3 (d + h + 1) / eps

  static GadgetConstants from_epsilon(double epsilon);
  /// Vertex weight on an edge of the given preference rank.
  double weight(std::size_t rank) const;
};

/// Requires epsilon < 1e-3. Certified concave/convex.
Instance make_hypergraph_gadget(const Hypergraph& h, double epsilon);

// ---------------------------------------------------------------------------
// Road network mean estimation.

/// Undirected simple graph with sorted adjacency lists.
class Graph {
 public:
  Graph(std::size_t node_count,
        std::vector<std::pair<std::size_t, std::size_t>> edges);

  std::size_t node_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const {
    return edges_;
  }
  const std::vector<std::size_t>& neighbors(std::size_t v) const {
    return adjacency_.at(v);
  }
  /// Index of the undirected edge {a, b}, if present.
  std::optional<std::size_t> edge_id(std::size_t a, std::size_t b) const;

 private:
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> edge_index_;
};

/// `u v` per line, 0-based ids; blank lines and `#` comments ignored.
Graph parse_edge_list(std::istream& in);
Graph load_edge_list(const std::filesystem::path& path);
/// rows x cols 4-neighbour grid graph.
Graph grid_graph(std::size_t rows, std::size_t cols);
/// The bundled 200-node synthetic road network (a 10 x 20 grid).
Graph synthetic200();

/// BFS layers from `root`: layer[t] holds the nodes at distance t, in
/// discovery order.
std::vector<std::vector<std::size_t>> bfs_layers(const Graph& g,
                                                 std::size_t root);
/// Shortest path root -> target along BFS parents (sorted adjacency makes
/// it deterministic). Empty if unreachable.
std::vector<std::size_t> shortest_path(const Graph& g, std::size_t root,
                                       std::size_t target);

/// Path from `root` to a node drawn uniformly from BFS layer `depth`.
std::vector<std::size_t> sample_path_at_depth(const Graph& g, std::size_t root,
                                              std::size_t depth, Rng& rng);
/// Random root, depth uniform in [min_length, BFS depth of root], target
/// uniform in that layer; returns the node sequence. Roots whose BFS depth
/// is below min_length are redrawn up to `max_retries` times.
std::vector<std::size_t> sample_path(const Graph& g, Rng& rng,
                                     std::size_t min_length = 5,
                                     std::size_t max_retries = 1000);

struct RoadInstanceParams {
  std::size_t node_count = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<double> variance;    // sigma_e^2 per edge, in [0,1]
  std::vector<double> share_cost;  // mu_e per edge
  std::vector<std::vector<std::size_t>> paths;      // node sequences
  std::vector<std::vector<std::int64_t>> samples;   // z_e^i along each path
  std::vector<double> agent_cost_scale;             // mu_i
  std::uint64_t seed = 0;

  void validate() const;
};

/// sigma_e ~ U[0,1], mu_e = (1 - sigma_e) 1e-3, z ~ U{4..9}, mu_i = 1.
RoadInstanceParams random_road_params(const Graph& g, std::size_t agents,
                                      std::uint64_t seed);
Instance make_road_instance(const RoadInstanceParams& params);

// ---------------------------------------------------------------------------
// Instance documents.

inline constexpr int kInstanceFormatVersion = 1;

/// Rebuild an instance from its document (family + realized parameters).
Instance instance_from_document(const nlohmann::json& doc);
void write_instance(const Instance& inst, const std::filesystem::path& path);
Instance read_instance(const std::filesystem::path& path);

}  // namespace dexcore

#endif  // DEXCORE_INSTANCES_HPP
