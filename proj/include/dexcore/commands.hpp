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

// Pipeline entry points shared by the command-line tool and the tests.

#ifndef DEXCORE_COMMANDS_HPP
#define DEXCORE_COMMANDS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dexcore/instances.hpp"
#include "dexcore/model.hpp"
#include "dexcore/scarf.hpp"

namespace dexcore {

struct RunMetrics {
  std::size_t n = 0;
  std::size_t coalition_columns = 0;
  std::uint64_t optimization_calls = 0;
  double matrix_build_seconds = 0.0;
  double pivot_seconds = 0.0;
  std::size_t iterations = 0;
  double epsilon = 0.0;
  double alpha = 0.0;
  std::size_t s = 0;
  std::uint64_t seed = 0;
  std::string status = "ok";

  static std::string csv_header();
  std::string to_csv() const;
  /// Throws InvalidArgument on a malformed row.
  static RunMetrics from_csv(const std::string& row);
};

void write_exchange(const ExchangeMatrix& x, std::ostream& out);
ExchangeMatrix parse_exchange(std::istream& in);
void save_exchange(const ExchangeMatrix& x, const std::filesystem::path& path);
ExchangeMatrix load_exchange(const std::filesystem::path& path);

struct GenRequest {
  std::string family;
  double epsilon = 0.01;
  double cap = 0.0;                    // concave-cost plateau; 0 = default
  std::string nodes = "synthetic200";  // road graph: name or edge-list path
  std::size_t agents = 6;
  std::uint64_t seed = 0;
  std::string hypergraph;              // gadget source file
};

Instance generate_instance(const GenRequest& request);
Graph load_road_graph(const std::string& nodes);

struct SolveConfig {
  std::size_t s = 3;
  double epsilon = 0.1;
  double alpha = 0.1;  // echoed into metrics
  std::size_t iteration_cap = 0;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::size_t column_budget = 200'000;
  std::size_t grid_budget = 2'000'000;
};

struct SolveOutcome {
  MatrixPair pair;
  ScarfSolution solution;
  ExchangeMatrix exchange;
  RunMetrics metrics;
  double certificate_gap = 0.0;
};

/// Builds the matrices on a grid of epsilon / 2 (decision slack epsilon /
/// 4) and pivots; the result is epsilon-core-stable at the matrix level.
SolveOutcome solve_instance(const Instance& inst, const SolveConfig& config);

struct BenchConfig {
  std::string nodes = "synthetic200";
  std::vector<std::size_t> n_list{3, 6, 9};
  std::size_t repeats = 5;
  std::uint64_t seed = 1;
  SolveConfig solve;
};

/// One row per (n, repeat); failures are recorded in the status column.
std::vector<RunMetrics> run_bench(const BenchConfig& config, std::ostream* csv);

}  // namespace dexcore

#endif  // DEXCORE_COMMANDS_HPP
