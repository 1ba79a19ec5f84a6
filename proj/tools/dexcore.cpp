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

// dexcore: generate instances, solve for an approximately core-stable
// exchange, verify exchanges, and run the benchmark sweep.

#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "dexcore/commands.hpp"
#include "dexcore/errors.hpp"
#include "dexcore/verify.hpp"

namespace {

constexpr int kExitBlocked = 2;
constexpr int kExitBudget = 3;
constexpr int kExitInput = 4;

void print_certificate(const dexcore::BlockingCertificate& cert) {
  std::cout << "blocked by coalition " << cert.coalition.to_string() << '\n'
            << "gains:";
  for (double g : cert.improvements) std::cout << ' ' << g;
  std::cout << "\ndeviation:\n";
  dexcore::write_exchange(cert.deviation, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Core-stable data exchange toolkit"};
  app.require_subcommand(1);

  dexcore::GenRequest gen;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("gen", "write an instance file");
  gen_cmd->add_option("family", gen.family,
                      "counterexample | concave-cost | convex-convex | road | gadget")
      ->required();
  gen_cmd->add_option("--epsilon", gen.epsilon, "family epsilon");
  gen_cmd->add_option("--cap", gen.cap, "concave-cost plateau (default 100/eps)");
  gen_cmd->add_option("--nodes", gen.nodes, "road graph: synthetic200 or edge-list file");
  gen_cmd->add_option("--agents", gen.agents, "road agent count");
  gen_cmd->add_option("--seed", gen.seed, "random seed");
  gen_cmd->add_option("--hypergraph", gen.hypergraph, "gadget hypergraph file");
  gen_cmd->add_option("--out", gen_out, "output path")->required();

  std::string solve_in, solve_out, solve_metrics;
  dexcore::SolveConfig solve;
  auto* solve_cmd = app.add_subcommand("solve", "compute an epsilon-core exchange");
  solve_cmd->add_option("instance", solve_in)->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--coalition-size", solve.s, "largest coalition considered");
  solve_cmd->add_option("--epsilon", solve.epsilon, "core approximation");
  solve_cmd->add_option("--alpha", solve.alpha, "echoed into the metrics row");
  solve_cmd->add_option("--iteration-cap", solve.iteration_cap, "pivot cap (0: 50 m)");
  solve_cmd->add_option("--seed", solve.seed, "echoed into the metrics row");
  solve_cmd->add_option("--threads", solve.threads, "matrix build threads");
  solve_cmd->add_option("--out", solve_out, "exchange output path");
  solve_cmd->add_option("--metrics", solve_metrics, "append a metrics CSV row here");

  std::string verify_in, verify_x;
  dexcore::VerifyConfig verify;
  auto* verify_cmd = app.add_subcommand("verify", "search for a blocking coalition");
  verify_cmd->add_option("instance", verify_in)->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("exchange", verify_x)->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("--coalition-size", verify.max_coalition);
  verify_cmd->add_option("--alpha", verify.alpha, "required gain per member");
  verify_cmd->add_option("--grid-step", verify.grid_step, "deviation grid spacing");
  verify_cmd->add_option("--threads", verify.threads);

  std::string cases_in;
  auto* cases_cmd =
      app.add_subcommand("cases", "blocking table of a three-agent counterexample");
  cases_cmd->add_option("instance", cases_in)->required()->check(CLI::ExistingFile);

  dexcore::BenchConfig bench;
  std::string bench_out;
  auto* bench_cmd = app.add_subcommand("bench", "road-network benchmark sweep");
  bench_cmd->add_option("--nodes", bench.nodes);
  bench_cmd->add_option("--n-list", bench.n_list)->delimiter(',');
  bench_cmd->add_option("--repeats", bench.repeats);
  bench_cmd->add_option("--seed", bench.seed, "first seed; repeat r uses seed + r");
  bench_cmd->add_option("--epsilon", bench.solve.epsilon);
  bench_cmd->add_option("--alpha", bench.solve.alpha);
  bench_cmd->add_option("--coalition-size", bench.solve.s);
  bench_cmd->add_option("--iteration-cap", bench.solve.iteration_cap);
  bench_cmd->add_option("--out", bench_out, "CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_cmd) {
      const auto inst = dexcore::generate_instance(gen);
      dexcore::write_instance(inst, gen_out);
      std::cout << "wrote " << inst.label() << " with " << inst.size()
                << " agents to " << gen_out << '\n';
      return 0;
    }
    if (*solve_cmd) {
      const auto inst = dexcore::read_instance(solve_in);
      dexcore::RunMetrics metrics;
      int code = 0;
      try {
        auto outcome = dexcore::solve_instance(inst, solve);
        metrics = outcome.metrics;
        if (solve_out.empty())
          dexcore::write_exchange(outcome.exchange, std::cout);
        else
          dexcore::save_exchange(outcome.exchange, solve_out);
        std::cerr << "columns " << metrics.coalition_columns << ", iterations "
                  << metrics.iterations << ", certificate gap "
                  << outcome.certificate_gap << '\n';
      } catch (const dexcore::BudgetExceeded& e) {
        metrics.status = "budget";
        std::cerr << "budget exceeded: " << e.what() << '\n';
        code = kExitBudget;
      } catch (const dexcore::ToleranceExceeded& e) {
        metrics.status = "cap";
        std::cerr << "solver limit: " << e.what() << '\n';
        code = kExitBudget;
      }
      metrics.n = inst.size();
      metrics.s = solve.s;
      metrics.seed = solve.seed;
      metrics.epsilon = solve.epsilon;
      metrics.alpha = solve.alpha;
      if (!solve_metrics.empty()) {
        const bool fresh = !std::filesystem::exists(solve_metrics) ||
                           std::filesystem::file_size(solve_metrics) == 0;
        std::ofstream csv(solve_metrics, std::ios::app);
        if (fresh) csv << dexcore::RunMetrics::csv_header() << '\n';
        csv << metrics.to_csv() << '\n';
      } else {
        std::cerr << dexcore::RunMetrics::csv_header() << '\n'
                  << metrics.to_csv() << '\n';
      }
      return code;
    }
    if (*verify_cmd) {
      const auto inst = dexcore::read_instance(verify_in);
      const auto x = dexcore::load_exchange(verify_x);
      const auto result = dexcore::find_blocking_coalition(inst, x, verify);
      if (result.certificate) {
        print_certificate(*result.certificate);
        return kExitBlocked;
      }
      if (!result.complete) {
        std::cout << "no blocking coalition found, but the search stopped at "
                  << std::setprecision(4) << 100.0 * result.coverage
                  << "% coverage\n";
        return kExitBudget;
      }
      std::cout << "no coalition of size <= " << verify.max_coalition
                << " improves every member by more than " << verify.alpha << '\n';
      return 0;
    }
    if (*cases_cmd) {
      const auto inst = dexcore::read_instance(cases_in);
      const auto a = dexcore::enumerate_counterexample_cases(inst);
      for (const auto& c : a.cases) {
        std::cout << std::left << std::setw(18) << c.name << ' ';
        if (c.coalition)
          std::cout << "blocked by " << c.coalition->to_string() << ", min gain "
                    << c.min_gain << '\n';
        else
          std::cout << "NOT blocked\n";
      }
      std::cout << "min gain " << a.min_gain << " (threshold " << a.threshold
                << ")\n";
      return a.all_blocked() ? 0 : 1;
    }
    if (*bench_cmd) {
      if (bench_out.empty()) {
        dexcore::run_bench(bench, &std::cout);
      } else {
        std::ofstream csv(bench_out);
        if (!csv) throw dexcore::InvalidArgument("cannot write " + bench_out);
        dexcore::run_bench(bench, &csv);
      }
      return 0;
    }
  } catch (const dexcore::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const dexcore::ToleranceExceeded& e) {
    std::cerr << "solver limit: " << e.what() << '\n';
    return kExitBudget;
  } catch (const dexcore::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return 0;
}
