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

// Blocking-coalition search, the counterexample case analysis, and the
// matching extraction for hypergraph gadget instances.

#ifndef DEXCORE_VERIFY_HPP
#define DEXCORE_VERIFY_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dexcore/instances.hpp"
#include "dexcore/model.hpp"
#include "dexcore/oracle.hpp"

namespace dexcore {

struct BlockingCertificate {
  Coalition coalition;
  ExchangeMatrix deviation;
  std::vector<double> improvements;  // per member, re-evaluated
};

struct VerifyConfig {
  std::size_t max_coalition = 3;
  double alpha = 0.1;
  double grid_step = 0.05;
  /// Grid nodes visited per coalition before the search gives up.
  std::size_t node_budget = 20'000'000;
  AscentConfig ascent{2000, 0.5, 500};
  std::size_t threads = 1;
};

struct VerifyResult {
  std::optional<BlockingCertificate> certificate;
  /// Fraction of the deviation grid searched, averaged over coalitions.
  double coverage = 1.0;
  bool complete = true;
  std::size_t coalitions_checked = 0;
  std::size_t grid_nodes = 0;
};

VerifyResult find_blocking_coalition(const Instance& inst,
                                     const ExchangeMatrix& x,
                                     const VerifyConfig& config);

/// Exhaustive search restricted to one coalition.
VerifyResult search_coalition(const Instance& inst, const ExchangeMatrix& x,
                              const Coalition& s, const VerifyConfig& config);

struct CaseReport {
  std::string name;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // active shares
  std::size_t samples = 0;
  std::optional<Coalition> coalition;
  std::optional<ExchangeMatrix> deviation;
  double min_gain = 0.0;  // over samples and members
};

struct CaseAnalysis {
  std::vector<CaseReport> cases;
  double min_gain = 0.0;
  double threshold = 0.0;
  bool all_blocked() const;
};

/// Table of the six support patterns of a three-agent exchange. Every
/// pattern, at every sampled share level, must admit a deviation.
CaseAnalysis enumerate_counterexample_cases(const Instance& inst);

struct FractionalMatching {
  std::vector<double> f;  // per hyperedge
};

struct MatchingExtraction {
  ExchangeMatrix adjusted;
  std::vector<double> f_plus;   // common in-share of each intermediate agent
  std::vector<double> f_minus;  // common out-share of each intermediate agent
  FractionalMatching matching;
};

/// Equalizes each intermediate agent's shares, then scales
/// max(f+, f-) by (1 - eps) / (1 + eps).
MatchingExtraction extract_fractional_matching(const Instance& gadget,
                                               const Hypergraph& h,
                                               const ExchangeMatrix& x);

/// Pure equalization step (idempotent).
ExchangeMatrix equalize_gadget_shares(const Hypergraph& h,
                                      const ExchangeMatrix& x);

struct MatchingStability {
  std::vector<bool> stable;       // per edge
  std::vector<double> best_mass;  // best vertex's weakly-preferred mass
  double slack = 0.0;             // min over edges of best_mass
  bool all_stable() const;
};

MatchingStability check_matching_stability(const Hypergraph& h,
                                           const FractionalMatching& f,
                                           double epsilon_target);

}  // namespace dexcore

#endif  // DEXCORE_VERIFY_HPP
