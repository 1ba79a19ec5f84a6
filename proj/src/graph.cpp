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
#include <fstream>
#include <limits>
#include <sstream>

#include "dexcore/errors.hpp"
#include "dexcore/instances.hpp"

namespace dexcore {

Graph::Graph(std::size_t node_count,
             std::vector<std::pair<std::size_t, std::size_t>> edges)
    : adjacency_(node_count), edge_index_(node_count) {
  for (auto [a, b] : edges) {
    if (a >= node_count || b >= node_count)
      throw InvalidArgument("edge (" + std::to_string(a) + "," +
                            std::to_string(b) + ") references a missing node");
    if (a == b) throw InvalidArgument("self-loop at node " + std::to_string(a));
    if (a > b) std::swap(a, b);
    if (edge_id(a, b)) continue;  // duplicate lines collapse
    const std::size_t id = edges_.size();
    edges_.emplace_back(a, b);
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
    edge_index_[a].emplace_back(b, id);
    edge_index_[b].emplace_back(a, id);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

std::optional<std::size_t> Graph::edge_id(std::size_t a, std::size_t b) const {
  if (a >= edge_index_.size()) return std::nullopt;
  for (auto [other, id] : edge_index_[a])
    if (other == b) return id;
  return std::nullopt;
}

Graph parse_edge_list(std::istream& in) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t max_node = 0;
  bool any = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream ls(line);
    long long a, b;
    if (!(ls >> a)) continue;
    if (!(ls >> b) || a < 0 || b < 0)
      throw InvalidArgument("edge list line " + std::to_string(line_no) +
                            ": expected two nonnegative node ids");
    edges.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
    max_node = std::max({max_node, edges.back().first, edges.back().second});
    any = true;
  }
  if (!any) throw InvalidArgument("edge list is empty");
  return Graph(max_node + 1, std::move(edges));
}

Graph load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open edge list " + path.string());
  return parse_edge_list(in);
}

Graph grid_graph(std::size_t rows, std::size_t cols) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t v = r * cols + c;
      if (c + 1 < cols) edges.emplace_back(v, v + 1);
      if (r + 1 < rows) edges.emplace_back(v, v + cols);
    }
  return Graph(rows * cols, std::move(edges));
}

Graph synthetic200() { return grid_graph(10, 20); }

namespace {

constexpr std::size_t kUnseen = std::numeric_limits<std::size_t>::max();

struct BfsTree {
  std::vector<std::size_t> dist;
  std::vector<std::size_t> parent;
  std::vector<std::size_t> order;  // discovery order
};

BfsTree bfs(const Graph& g, std::size_t root) {
  if (root >= g.node_count())
    throw InvalidArgument("BFS root " + std::to_string(root) + " out of range");
  std::vector<std::size_t> dist(g.node_count(), kUnseen);
  std::vector<std::size_t> parent(g.node_count(), kUnseen);
  std::vector<std::size_t> queue{root};
  dist[root] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t v = queue[head];
    for (std::size_t w : g.neighbors(v)) {
      if (dist[w] != kUnseen) continue;
      dist[w] = dist[v] + 1;
      parent[w] = v;
      queue.push_back(w);
    }
  }
  return {std::move(dist), std::move(parent), std::move(queue)};
}

}  // namespace

std::vector<std::vector<std::size_t>> bfs_layers(const Graph& g,
                                                 std::size_t root) {
  const auto tree = bfs(g, root);
  std::vector<std::vector<std::size_t>> layers;
  for (std::size_t v : tree.order) {
    if (tree.dist[v] >= layers.size()) layers.resize(tree.dist[v] + 1);
    layers[tree.dist[v]].push_back(v);
  }
  return layers;
}

std::vector<std::size_t> shortest_path(const Graph& g, std::size_t root,
                                       std::size_t target) {
  const auto tree = bfs(g, root);
  if (target >= g.node_count() || tree.dist[target] == kUnseen) return {};
  std::vector<std::size_t> path;
  for (std::size_t v = target; v != kUnseen; v = tree.parent[v])
    path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<std::size_t> sample_path_at_depth(const Graph& g, std::size_t root,
                                              std::size_t depth, Rng& rng) {
  const auto layers = bfs_layers(g, root);
  if (depth == 0 || depth >= layers.size())
    throw InvalidArgument("no BFS layer " + std::to_string(depth) +
                          " below node " + std::to_string(root));
  const auto& layer = layers[depth];
  const auto pick = static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(layer.size()) - 1));
  return shortest_path(g, root, layer[pick]);
}

std::vector<std::size_t> sample_path(const Graph& g, Rng& rng,
                                     std::size_t min_length,
                                     std::size_t max_retries) {
  if (g.node_count() == 0) throw InvalidArgument("empty graph");
  for (std::size_t attempt = 0; attempt < max_retries; ++attempt) {
    const auto root = static_cast<std::size_t>(rng.uniform_int(
        0, static_cast<std::int64_t>(g.node_count()) - 1));
    const auto layers = bfs_layers(g, root);
    const std::size_t depth = layers.size() - 1;
    if (depth < min_length) continue;
    const auto t = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(min_length),
                        static_cast<std::int64_t>(depth)));
    return sample_path_at_depth(g, root, t, rng);
  }
  throw InvalidArgument("no root with BFS depth >= " +
                        std::to_string(min_length) + " after " +
                        std::to_string(max_retries) + " draws");
}

}  // namespace dexcore
