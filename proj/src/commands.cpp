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

#include "dexcore/commands.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "dexcore/errors.hpp"

namespace dexcore {

std::string RunMetrics::csv_header() {
  return "n,coalition_columns,optimization_calls,matrix_build_seconds,"
         "pivot_seconds,iterations,epsilon,alpha,s,seed,status";
}

std::string RunMetrics::to_csv() const {
  std::ostringstream out;
  out << n << ',' << coalition_columns << ',' << optimization_calls << ','
      << std::setprecision(9) << matrix_build_seconds << ',' << pivot_seconds
      << ',' << iterations << ',' << epsilon << ',' << alpha << ',' << s << ','
      << seed << ',' << status;
  return out.str();
}

RunMetrics RunMetrics::from_csv(const std::string& row) {
  std::vector<std::string> cells;
  std::stringstream ss(row);
  for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
  if (cells.size() != 11)
    throw InvalidArgument("metrics row has " + std::to_string(cells.size()) +
                          " cells, expected 11");
  RunMetrics m;
  try {
    m.n = std::stoull(cells[0]);
    m.coalition_columns = std::stoull(cells[1]);
    m.optimization_calls = std::stoull(cells[2]);
    m.matrix_build_seconds = std::stod(cells[3]);
    m.pivot_seconds = std::stod(cells[4]);
    m.iterations = std::stoull(cells[5]);
    m.epsilon = std::stod(cells[6]);
    m.alpha = std::stod(cells[7]);
    m.s = std::stoull(cells[8]);
    m.seed = std::stoull(cells[9]);
  } catch (const std::logic_error&) {
    throw InvalidArgument("metrics row has a malformed number: " + row);
  }
  m.status = cells[10];
  return m;
}

void write_exchange(const ExchangeMatrix& x, std::ostream& out) {
  out << std::fixed << std::setprecision(12);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) out << (j ? " " : "") << x(i, j);
    out << '\n';
  }
}

ExchangeMatrix parse_exchange(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::logic_error&) {
        throw InvalidArgument("exchange file has a non-numeric entry '" + tok + "'");
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument("exchange file is empty");
  return ExchangeMatrix::from_rows(rows);
}

void save_exchange(const ExchangeMatrix& x, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write exchange " + path.string());
  write_exchange(x, out);
}

ExchangeMatrix load_exchange(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open exchange " + path.string());
  return parse_exchange(in);
}

Graph load_road_graph(const std::string& nodes) {
  if (nodes == "synthetic200") return synthetic200();
  return load_edge_list(nodes);
}

Instance generate_instance(const GenRequest& r) {
  if (r.family == "counterexample") return make_counterexample(r.epsilon);
  if (r.family == "concave-cost")
    return make_concave_cost_counterexample(r.epsilon, r.cap);
  if (r.family == "convex-convex") return make_convex_convex_counterexample(r.epsilon);
  if (r.family == "road")
    return make_road_instance(
        random_road_params(load_road_graph(r.nodes), r.agents, r.seed));
  if (r.family == "gadget") {
    if (r.hypergraph.empty())
      throw InvalidArgument("gadget generation needs a hypergraph file");
    return make_hypergraph_gadget(load_hypergraph(r.hypergraph), r.epsilon);
  }
  throw InvalidArgument("unknown family '" + r.family + "'");
}

SolveOutcome solve_instance(const Instance& inst, const SolveConfig& config) {
  if (!inst.certified())
    throw Unsupported("instance '" + inst.label() +
                      "' is not concave/convex certified; solve needs concave "
                      "payoffs and convex costs");
  if (!(config.epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  BuildConfig build;
  build.max_coalition = std::min(config.s, inst.size());
  build.oracle = OracleConfig::for_grid(config.epsilon / 2.0);
  build.oracle.grid_budget = config.grid_budget;
  build.column_budget = config.column_budget;
  build.threads = config.threads;

  SolveOutcome out;
  auto& m = out.metrics;
  m.n = inst.size();
  m.epsilon = config.epsilon;
  m.alpha = config.alpha;
  m.s = config.s;
  m.seed = config.seed;

  if (build.max_coalition < 2) {
    // A lone agent can only keep everything to itself.
    out.exchange = ExchangeMatrix(inst.size());
    return out;
  }
  out.pair = build_matrices(inst, build);
  m.coalition_columns = out.pair.m() - out.pair.n;
  m.optimization_calls = out.pair.counters.optimization_calls;
  m.matrix_build_seconds = out.pair.build_seconds;
  out.solution = scarf_solve(out.pair, config.iteration_cap);
  m.iterations = out.solution.iterations;
  m.pivot_seconds = out.solution.cardinal_seconds + out.solution.ordinal_seconds;
  out.exchange = out.solution.exchange;
  out.certificate_gap = certificate_gap(out.pair, inst, out.exchange);
  return out;
}

std::vector<RunMetrics> run_bench(const BenchConfig& config, std::ostream* csv) {
  const Graph g = load_road_graph(config.nodes);
  if (csv) *csv << RunMetrics::csv_header() << '\n';
  std::vector<RunMetrics> rows;
  for (std::size_t n : config.n_list)
    for (std::size_t r = 0; r < config.repeats; ++r) {
      SolveConfig sc = config.solve;
      sc.seed = config.seed + r;
      RunMetrics row;
      try {
        const Instance inst = make_road_instance(random_road_params(g, n, sc.seed));
        row = solve_instance(inst, sc).metrics;
      } catch (const BudgetExceeded&) {
        row.status = "budget";
      } catch (const ToleranceExceeded&) {
        row.status = "cap";
      } catch (const Error&) {
        row.status = "error";
      }
      row.n = n;
      row.seed = sc.seed;
      row.epsilon = sc.epsilon;
      row.alpha = sc.alpha;
      row.s = sc.s;
      if (csv) *csv << row.to_csv() << '\n' << std::flush;
      rows.push_back(row);
    }
  return rows;
}

}  // namespace dexcore
