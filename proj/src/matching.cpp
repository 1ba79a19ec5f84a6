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
#include <limits>

#include "dexcore/errors.hpp"
#include "dexcore/verify.hpp"

namespace dexcore {

namespace {

constexpr double kRationalTol = 1e-9;

std::vector<std::size_t> partners(const GadgetLayout& lay, const Hypergraph& h,
                                  std::size_t e) {
  std::vector<std::size_t> out{lay.edge_agent(e)};
  for (std::size_t v : h.edges[e]) out.push_back(lay.vertex_agent(v));
  return out;
}

}  // namespace

ExchangeMatrix equalize_gadget_shares(const Hypergraph& h,
                                      const ExchangeMatrix& x) {
  const GadgetLayout lay{h.vertex_count, h.edges.size()};
  if (x.size() != lay.agent_count())
    throw InvalidArgument("exchange does not match the gadget layout");
  ExchangeMatrix y = x;
  for (std::size_t e = 0; e < h.edges.size(); ++e) {
    const std::size_t mid = lay.intermediate_agent(e);
    const auto ps = partners(lay, h, e);
    double out_max = 0.0, in_min = 1.0;
    for (std::size_t p : ps) {
      out_max = std::max(out_max, x(mid, p));
      in_min = std::min(in_min, x(p, mid));
    }
    for (std::size_t p : ps) {
      y.set(mid, p, out_max);
      y.set(p, mid, in_min);
    }
  }
  return y;
}

MatchingExtraction extract_fractional_matching(const Instance& gadget,
                                               const Hypergraph& h,
                                               const ExchangeMatrix& x) {
  if (gadget.family() != "gadget")
    throw InvalidArgument("matching extraction needs a gadget instance");
  const GadgetLayout lay{h.vertex_count, h.edges.size()};
  if (gadget.size() != lay.agent_count() || x.size() != lay.agent_count())
    throw InvalidArgument("instance, hypergraph, and exchange disagree in size");
  const double eps = gadget.document().at("params").at("epsilon").get<double>();

  std::vector<double> before(gadget.size());
  for (std::size_t i = 0; i < gadget.size(); ++i) {
    before[i] = utility(gadget, i, x);
    if (before[i] < -kRationalTol)
      throw PreconditionError("agent " + std::to_string(i) +
                              " has negative utility " +
                              std::to_string(before[i]) +
                              "; the exchange is not individually rational");
  }

  MatchingExtraction out;
  out.adjusted = equalize_gadget_shares(h, x);
  for (std::size_t i = 0; i < gadget.size(); ++i)
    if (utility(gadget, i, out.adjusted) < before[i] - kRationalTol)
      throw StructuralError("equalizing shares lowered the utility of agent " +
                            std::to_string(i));

  const double scale = (1.0 - eps) / (1.0 + eps);
  for (std::size_t e = 0; e < h.edges.size(); ++e) {
    const std::size_t mid = lay.intermediate_agent(e);
    const std::size_t ea = lay.edge_agent(e);
    out.f_plus.push_back(out.adjusted(ea, mid));
    out.f_minus.push_back(out.adjusted(mid, ea));
    out.matching.f.push_back(std::max(out.f_plus.back(), out.f_minus.back()) *
                             scale);
  }
  return out;
}

bool MatchingStability::all_stable() const {
  return std::all_of(stable.begin(), stable.end(), [](bool b) { return b; });
}

MatchingStability check_matching_stability(const Hypergraph& h,
                                           const FractionalMatching& f,
                                           double epsilon_target) {
  h.validate();
  if (f.f.size() != h.edges.size())
    throw InvalidArgument("matching needs one value per hyperedge");
  for (std::size_t e = 0; e < f.f.size(); ++e)
    if (!(f.f[e] >= 0.0 && f.f[e] <= 1.0))
      throw InvalidArgument("matching value of edge " + std::to_string(e) +
                            " outside [0,1]");
  for (std::size_t v = 0; v < h.vertex_count; ++v) {
    double load = 0.0;
    for (std::size_t e : h.incident(v)) load += f.f[e];
    if (load > 1.0 + 1e-9)
      throw InvalidArgument("vertex " + std::to_string(v) + " carries " +
                            std::to_string(load) + " > 1");
  }

  MatchingStability report;
  report.slack = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < h.edges.size(); ++e) {
    double best = 0.0;
    for (std::size_t v : h.edges[e]) {
      double mass = 0.0;
      const std::size_t r = h.rank(v, e);
      for (std::size_t t = 0; t <= r; ++t) mass += f.f[h.preferences[v][t]];
      best = std::max(best, mass);
    }
    report.best_mass.push_back(best);
    report.stable.push_back(best >= 1.0 - epsilon_target);
    report.slack = std::min(report.slack, best);
  }
  if (h.edges.empty()) report.slack = 1.0;
  return report;
}

}  // namespace dexcore
