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
#include <fstream>
#include <sstream>

#include "dexcore/errors.hpp"
#include "dexcore/instances.hpp"

namespace dexcore {

namespace {

// Lowest index attaining the minimum (or maximum) among `idx` entries.
std::size_t arg_extreme(std::span<const double> v,
                        const std::vector<std::size_t>& idx, bool want_max) {
  std::size_t best = idx[0];
  for (std::size_t k = 1; k < idx.size(); ++k) {
    const double a = v[idx[k]], b = v[best];
    if (want_max ? a > b : a < b) best = idx[k];
  }
  return best;
}

}  // namespace

void Hypergraph::validate() const {
  std::vector<std::size_t> degree(vertex_count, 0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& ed = edges[e];
    for (std::size_t v : ed)
      if (v >= vertex_count)
        throw InvalidArgument("edge " + std::to_string(e) +
                              " references a missing vertex");
    if (ed[0] == ed[1] || ed[0] == ed[2] || ed[1] == ed[2])
      throw InvalidArgument("edge " + std::to_string(e) +
                            " must have three distinct vertices");
    for (std::size_t v : ed)
      if (++degree[v] > 3)
        throw InvalidArgument("vertex " + std::to_string(v) +
                              " lies on more than three edges");
  }
  if (preferences.size() != vertex_count)
    throw InvalidArgument("need one preference list per vertex");
  for (std::size_t v = 0; v < vertex_count; ++v) {
    auto want = incident(v);
    auto got = preferences[v];
    std::sort(got.begin(), got.end());
    if (got != want)
      throw InvalidArgument("preference list of vertex " + std::to_string(v) +
                            " is not an order of its incident edges");
  }
}

std::vector<std::size_t> Hypergraph::incident(std::size_t v) const {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (std::find(edges[e].begin(), edges[e].end(), v) != edges[e].end())
      out.push_back(e);
  return out;
}

std::size_t Hypergraph::rank(std::size_t v, std::size_t e) const {
  const auto& p = preferences.at(v);
  auto it = std::find(p.begin(), p.end(), e);
  if (it == p.end())
    throw InvalidArgument("edge " + std::to_string(e) +
                          " is not incident to vertex " + std::to_string(v));
  return static_cast<std::size_t>(it - p.begin());
}

Hypergraph Hypergraph::with_default_preferences(
    std::size_t vertex_count, std::vector<std::array<std::size_t, 3>> edges) {
  Hypergraph h;
  h.vertex_count = vertex_count;
  h.edges = std::move(edges);
  h.preferences.resize(vertex_count);
  for (std::size_t v = 0; v < vertex_count; ++v)
    h.preferences[v] = h.incident(v);
  h.validate();
  return h;
}

Hypergraph parse_hypergraph(std::istream& in) {
  std::optional<std::size_t> vertices;
  std::vector<std::array<std::size_t, 3>> edges;
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> prefs;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw InvalidArgument("hypergraph line " + std::to_string(line_no) + ": " +
                          what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "vertices") {
      long long n;
      if (!(ls >> n) || n < 0) fail("expected a vertex count");
      vertices = static_cast<std::size_t>(n);
    } else if (key == "edge") {
      std::array<long long, 3> raw;
      if (!(ls >> raw[0] >> raw[1] >> raw[2])) fail("edge needs three vertices");
      std::array<std::size_t, 3> e;
      for (int k = 0; k < 3; ++k) {
        if (raw[k] < 0) fail("negative vertex id");
        e[k] = static_cast<std::size_t>(raw[k]);
      }
      edges.push_back(e);
    } else if (key == "pref") {
      long long v, e;
      if (!(ls >> v) || v < 0) fail("pref needs a vertex id");
      std::vector<std::size_t> order;
      while (ls >> e) {
        if (e < 0) fail("negative edge id");
        order.push_back(static_cast<std::size_t>(e));
      }
      prefs.emplace_back(static_cast<std::size_t>(v), std::move(order));
    } else {
      fail("unknown keyword '" + key + "'");
    }
    std::string extra;
    if (key != "pref" && (ls >> extra)) fail("trailing tokens");
  }
  if (!vertices) throw InvalidArgument("hypergraph lacks a 'vertices' line");
  Hypergraph h;
  h.vertex_count = *vertices;
  h.edges = std::move(edges);
  h.preferences.resize(h.vertex_count);
  for (std::size_t v = 0; v < h.vertex_count; ++v)
    h.preferences[v] = h.incident(v);
  for (auto& [v, order] : prefs) {
    if (v >= h.vertex_count)
      throw InvalidArgument("pref for missing vertex " + std::to_string(v));
    h.preferences[v] = std::move(order);
  }
  h.validate();
  return h;
}

Hypergraph load_hypergraph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open hypergraph " + path.string());
  return parse_hypergraph(in);
}

GadgetConstants GadgetConstants::from_epsilon(double epsilon) {
  GadgetConstants k;
  k.epsilon = epsilon;
  k.d = std::pow(epsilon, -0.25);
  k.h = std::pow(epsilon, -0.5);
  k.gamma = 3.0 * (k.d + k.h + 1.0) / epsilon;
  return k;
}

double GadgetConstants::weight(std::size_t rank) const {
  switch (rank) {
    case 0: return d + h + 1.0;
    case 1: return d + h;
    case 2: return h;
    default: throw InvalidArgument("preference rank above 2");
  }
}

Instance make_hypergraph_gadget(const Hypergraph& hg, double epsilon) {
  hg.validate();
  if (!(epsilon > 0.0 && epsilon < 1e-3))
    throw InvalidArgument("gadget epsilon must lie in (0, 1e-3)");
  const auto k = GadgetConstants::from_epsilon(epsilon);
  const GadgetLayout lay{hg.vertex_count, hg.edges.size()};
  const std::size_t n = lay.agent_count();
  std::vector<AgentUtility> agents(n);

  for (std::size_t v = 0; v < hg.vertex_count; ++v) {
    std::vector<std::pair<std::size_t, double>> weighted;  // (i_e, weight)
    std::vector<std::size_t> outs;
    for (std::size_t e : hg.incident(v)) {
      weighted.emplace_back(lay.intermediate_agent(e), k.weight(hg.rank(v, e)));
      outs.push_back(lay.intermediate_agent(e));
    }
    const double gamma = k.gamma;
    auto& a = agents[lay.vertex_agent(v)];
    a.payoff = [weighted](std::span<const double> in) {
      double s = 0.0;
      for (auto [j, w] : weighted) s += w * in[j];
      return s;
    };
    a.payoff_supergradient = [weighted](std::span<const double>,
                                        std::span<double> g) {
      std::fill(g.begin(), g.end(), 0.0);
      for (auto [j, w] : weighted) g[j] = w;
    };
    a.cost = [outs, gamma](std::span<const double> out) {
      double s = -1.0;
      for (std::size_t j : outs) s += out[j];
      return gamma * std::max(s, 0.0);
    };
    a.cost_subgradient = [outs, gamma](std::span<const double> out,
                                       std::span<double> g) {
      std::fill(g.begin(), g.end(), 0.0);
      double s = -1.0;
      for (std::size_t j : outs) s += out[j];
      if (s > 0.0)
        for (std::size_t j : outs) g[j] = gamma;
    };
    a.concave_convex_certified = true;
  }

  const double keep = 1.0 - epsilon;
  for (std::size_t e = 0; e < hg.edges.size(); ++e) {
    const std::size_t ea = lay.edge_agent(e);
    const std::size_t ia = lay.intermediate_agent(e);
    // Partner order: edge agent first, then the edge's vertices.
    std::vector<std::size_t> partners{ea};
    for (std::size_t v : hg.edges[e]) partners.push_back(lay.vertex_agent(v));

    auto& mid = agents[ia];
    mid.payoff = [partners](std::span<const double> in) {
      return in[arg_extreme(in, partners, false)];
    };
    mid.payoff_supergradient = [partners](std::span<const double> in,
                                          std::span<double> g) {
      std::fill(g.begin(), g.end(), 0.0);
      g[arg_extreme(in, partners, false)] = 1.0;
    };
    mid.cost = [partners, keep](std::span<const double> out) {
      return keep * out[arg_extreme(out, partners, true)];
    };
    mid.cost_subgradient = [partners, keep](std::span<const double> out,
                                            std::span<double> g) {
      std::fill(g.begin(), g.end(), 0.0);
      g[arg_extreme(out, partners, true)] = keep;
    };
    mid.concave_convex_certified = true;

    auto& edge = agents[ea];
    edge.payoff = [ia](std::span<const double> in) { return in[ia]; };
    edge.payoff_supergradient = [ia](std::span<const double>,
                                     std::span<double> g) {
      std::fill(g.begin(), g.end(), 0.0);
      g[ia] = 1.0;
    };
    edge.cost = [ia, keep](std::span<const double> out) {
      return keep * out[ia];
    };
    edge.cost_subgradient = [ia, keep](std::span<const double>,
                                       std::span<double> g) {
      std::fill(g.begin(), g.end(), 0.0);
      g[ia] = keep;
    };
    edge.concave_convex_certified = true;
  }

  nlohmann::json doc = {{"family", "gadget"},
                        {"params",
                         {{"epsilon", epsilon},
                          {"vertices", hg.vertex_count},
                          {"edges", hg.edges},
                          {"preferences", hg.preferences}}}};
  const double bound = all_ones_payoff(agents);
  return Instance(std::move(agents), bound, "gadget", std::move(doc));
}

}  // namespace dexcore
