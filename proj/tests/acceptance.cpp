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


// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
// and exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dexcore/commands.hpp"
#include "dexcore/instances.hpp"
#include "dexcore/oracle.hpp"
#include "dexcore/scarf.hpp"
#include "dexcore/verify.hpp"

using namespace dexcore;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void fail(const std::string& why) {
    if (pass) detail << "first failure: " << why << "; ";
    pass = false;
  }
};

std::string data(const std::string& name) {
  return std::string(DEXCORE_TEST_DATA) + "/" + name;
}

// ---------------------------------------------------------------------------

Outcome counterexample_cases() {
  Outcome out;
  const auto t0 = Clock::now();
  const double eps = 0.01;
  struct Family {
    const char* name;
    Instance inst;
  };
  std::vector<Family> families;
  families.push_back({"threshold", make_counterexample(eps)});
  families.push_back({"concave-cost", make_concave_cost_counterexample(eps)});
  families.push_back({"convex-convex", make_convex_convex_counterexample(eps)});
  for (const auto& f : families) {
    const auto a = enumerate_counterexample_cases(f.inst);
    std::size_t blocked = 0;
    for (const auto& c : a.cases) blocked += c.coalition.has_value();
    out.detail << f.name << " " << blocked << "/" << a.cases.size()
               << " blocked, min gain " << a.min_gain << " vs " << a.threshold << "; ";
    if (a.cases.size() != 6 || blocked != 6) out.fail(std::string(f.name) + " has an unblocked case");
    if (a.min_gain < a.threshold) out.fail(std::string(f.name) + " gain below threshold");
  }
  // The threshold family carries no discretization slack beyond eps.
  const auto main = enumerate_counterexample_cases(families[0].inst);
  if (main.min_gain < 0.125 - eps) out.fail("threshold family gain below 0.125 - eps");
  const double dt = since(t0);
  out.detail << "time " << dt << " s";
  if (dt >= 1.0) out.fail("slower than 1 s");
  return out;
}

// ---------------------------------------------------------------------------

struct RoadRun {
  std::size_t n;
  std::uint64_t seed;
  SolveOutcome solved;
  Instance inst;
};

std::vector<RoadRun>& road_runs() {
  static std::vector<RoadRun> runs = [] {
    std::vector<RoadRun> r;
    const std::vector<std::pair<std::size_t, std::size_t>> plan{{3, 7}, {6, 7}, {9, 6}};
    for (auto [n, count] : plan)
      for (std::uint64_t seed = 1; seed <= count; ++seed) {
        GenRequest req;
        req.family = "road";
        req.agents = n;
        req.seed = seed;
        auto inst = generate_instance(req);
        SolveConfig cfg;
        cfg.s = 3;
        cfg.epsilon = 0.1;
        cfg.seed = seed;
        auto solved = solve_instance(inst, cfg);
        r.push_back({n, seed, std::move(solved), std::move(inst)});
      }
    return r;
  }();
  return runs;
}

Outcome road_stability() {
  Outcome out;
  const auto t0 = Clock::now();
  auto& runs = road_runs();
  std::size_t clean = 0, zero_blocked = 0;
  std::map<std::size_t, std::vector<double>> iterations;
  for (const auto& run : runs) {
    VerifyConfig vc;
    vc.max_coalition = 3;
    vc.alpha = 0.1;
    vc.grid_step = 0.05;
    const auto v = find_blocking_coalition(run.inst, run.solved.exchange, vc);
    iterations[run.n].push_back(static_cast<double>(run.solved.metrics.iterations));
    if (!v.complete)
      out.detail << "n=" << run.n << " seed=" << run.seed << " search incomplete; ";
    // Control: the empty exchange should usually be blocked, or the
    // search is not looking hard enough to mean anything.
    zero_blocked +=
        find_blocking_coalition(run.inst, ExchangeMatrix(run.n), vc).certificate.has_value();
    if (v.certificate) {
      out.detail << "n=" << run.n << " seed=" << run.seed << " blocked by "
                 << v.certificate->coalition.to_string() << "; ";
    } else if (v.complete) {
      ++clean;
    }
  }
  out.detail << clean << "/" << runs.size() << " unblocked (empty exchange blocked on "
             << zero_blocked << ")";
  if (runs.size() != 20 || clean < 19) out.fail("fewer than 19 of 20 runs unblocked");
  std::vector<double> means;
  for (auto& [n, its] : iterations) {
    double s = 0;
    for (double t : its) s += t;
    means.push_back(s / static_cast<double>(its.size()));
    out.detail << ", mean iterations n=" << n << ": " << means.back();
  }
  const bool trend = std::is_sorted(means.begin(), means.end());
  out.detail << ", trend " << (trend ? "increasing" : "NOT increasing (soft)");
  out.detail << ", time " << since(t0) << " s plus solve";
  return out;
}

// ---------------------------------------------------------------------------

MatrixPair random_pair(std::size_t n, std::size_t m, Rng& rng) {
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, m), U(n, m);
  for (std::size_t i = 0; i < n; ++i) C(i, i) = 1.0;
  for (std::size_t k = n; k < m; ++k) {
    bool any = false;
    while (!any)
      for (std::size_t i = 0; i < n; ++i) {
        C(i, k) = rng.uniform() < 0.5 ? 1.0 : 0.0;
        any = any || C(i, k) == 1.0;
      }
  }
  // Identity own-row entries lowest, identity off-diagonal highest,
  // out-of-coalition entries in between.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      if (k < n)
        U(i, k) = k == i ? 0.0 : 100.0 + rng.uniform();
      else
        U(i, k) = C(i, k) == 1.0 ? rng.uniform(0.001, 1.0) : 10.0 + rng.uniform();
    }
  return MatrixPair::from_raw(C, U);
}

bool lemma_cardinal(const MatrixPair& p, const std::vector<std::size_t>& b) {
  Eigen::MatrixXd cb(p.n, p.n);
  for (std::size_t t = 0; t < b.size(); ++t) cb.col(t) = p.C.col(b[t]);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(cb);
  if (!lu.isInvertible()) return false;
  const Eigen::VectorXd x = lu.solve(Eigen::VectorXd::Ones(p.n));
  return x.minCoeff() >= -1e-9 && (cb * x - Eigen::VectorXd::Ones(p.n)).norm() <= 1e-9;
}

bool lemma_ordinal(const MatrixPair& p, const std::vector<std::size_t>& b) {
  for (std::size_t k = 0; k < p.m(); ++k) {
    bool ok = false;
    for (std::size_t i = 0; i < p.n && !ok; ++i) {
      double lo = INFINITY;
      for (std::size_t j : b) lo = std::min(lo, p.U(i, j));
      ok = p.U(i, k) <= lo;
    }
    if (!ok) return false;
  }
  return true;
}

Outcome scarf_brute_force() {
  Outcome out;
  const auto t0 = Clock::now();
  Rng rng(2026);
  std::size_t matched = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = 5 + static_cast<std::size_t>(rng.uniform_int(0, 2));
    const auto p = random_pair(3, m, rng);
    std::set<std::vector<std::size_t>> valid;
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a + 1; b < m; ++b)
        for (std::size_t c = b + 1; c < m; ++c) {
          const std::vector<std::size_t> basis{a, b, c};
          if (lemma_cardinal(p, basis) && lemma_ordinal(p, basis)) valid.insert(basis);
        }
    try {
      const auto sol = scarf_solve(p);
      if (valid.count(sol.basis) && lemma_cardinal(p, sol.basis) && lemma_ordinal(p, sol.basis))
        ++matched;
      else
        out.fail("pair " + std::to_string(t) + " basis not in the brute-force set");
    } catch (const std::exception& e) {
      out.fail("pair " + std::to_string(t) + ": " + e.what());
    }
  }
  const double dt = since(t0);
  out.detail << matched << "/100 matched, time " << dt << " s";
  if (dt >= 10.0) out.fail("slower than 10 s");
  return out;
}

// ---------------------------------------------------------------------------

Outcome epsilon_certificate() {
  Outcome out;
  const double eps = 0.1;
  double worst = -INFINITY;
  std::size_t columns = 0;
  for (const auto& run : road_runs()) {
    const auto& p = run.solved.pair;
    std::vector<double> u(p.n);
    for (std::size_t i = 0; i < p.n; ++i) u[i] = utility(run.inst, i, run.solved.exchange);
    for (std::size_t k = 0; k < p.m(); ++k) {
      double best = INFINITY;
      for (std::size_t i = 0; i < p.n; ++i) best = std::min(best, p.U(i, k) - u[i]);
      worst = std::max(worst, best);
      ++columns;
      if (best > eps + 1e-6)
        out.fail("n=" + std::to_string(run.n) + " seed=" + std::to_string(run.seed) +
                 " column " + std::to_string(k));
    }
  }
  out.detail << columns << " columns over " << road_runs().size()
             << " runs, worst excess " << worst << " (limit " << eps + 1e-6 << ")";
  return out;
}

// ---------------------------------------------------------------------------

Outcome gadget_pipeline() {
  Outcome out;
  const auto t0 = Clock::now();
  const double gadget_eps = 1e-4;
  const double threshold = 0.9;
  for (const char* name : {"two_edges.hg", "three_edges.hg", "four_edges.hg"}) {
    const auto h = load_hypergraph(data(name));
    const auto inst = make_hypergraph_gadget(h, gadget_eps);
    SolveConfig cfg;
    cfg.s = 5;  // an edge's intermediate, edge agent and three vertices
    cfg.epsilon = 0.1;
    const auto solved = solve_instance(inst, cfg);
    const auto ex = extract_fractional_matching(inst, h, solved.exchange);
    for (std::size_t v = 0; v < h.vertex_count; ++v) {
      double load = 0;
      for (std::size_t e : h.incident(v)) load += ex.matching.f[e];
      if (load > 1.0 + 1e-9) out.fail(std::string(name) + " vertex " + std::to_string(v) + " overloaded");
    }
    for (std::size_t e = 0; e < h.edges.size(); ++e) {
      const double fp = ex.f_plus[e], fm = ex.f_minus[e];
      if (!((1 - gadget_eps) * fp <= fm + 1e-9 && fm <= fp / (1 - gadget_eps) + 1e-9))
        out.fail(std::string(name) + " edge " + std::to_string(e) + " share bounds");
    }
    const auto st = check_matching_stability(h, ex.matching, 1.0 - threshold);
    if (!st.all_stable()) out.fail(std::string(name) + " unstable edge");
    out.detail << name << " slack " << st.slack << "; ";
  }
  const double dt = since(t0);
  out.detail << "threshold " << threshold << ", time " << dt << " s";
  if (dt >= 300.0) out.fail("slower than 5 min");
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, Instance>> certified_families() {
  std::vector<std::pair<std::string, Instance>> f;
  f.emplace_back("road", make_road_instance(random_road_params(synthetic200(), 6, 11)));
  f.emplace_back("gadget", make_hypergraph_gadget(load_hypergraph(data("two_edges.hg")), 1e-4));
  f.emplace_back("linear", make_linear_instance({{0, 0.5, 0.2}, {0.3, 0, 0.7}, {0.4, 0.1, 0}},
                                                {{0, 0.1, 0.3}, {0.2, 0, 0.1}, {0.05, 0.2, 0}}));
  return f;
}

ExchangeMatrix random_matrix(std::size_t n, Rng& rng, double lo, double hi) {
  ExchangeMatrix x(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) x.set(i, j, rng.uniform(lo, hi));
  return x;
}

Outcome first_order_oracle() {
  Outcome out;
  Rng rng(606);
  const double h = 1e-5;
  double worst_rel = 0, worst_slack = -INFINITY;
  for (const auto& [name, inst] : certified_families()) {
    Oracle oracle(inst);
    const std::size_t n = inst.size();
    for (int t = 0; t < 100; ++t) {
      const auto x = random_matrix(n, rng, 0.05, 0.95);
      for (std::size_t i = 0; i < n; ++i) {
        const auto g = oracle.supergradient_query(i, x);
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            auto up = x, down = x;
            up.set(a, b, x(a, b) + h);
            down.set(a, b, x(a, b) - h);
            const double fd = (oracle.value_query(i, up) - oracle.value_query(i, down)) / (2 * h);
            const double scale = std::max(std::abs(fd), std::abs(g(a, b)));
            const double err = std::abs(fd - g(a, b));
            if (scale > 0) worst_rel = std::max(worst_rel, err / scale);
            if (err > 1e-4 * scale + 1e-10)
              out.fail(name + " derivative of agent " + std::to_string(i) + " in (" +
                       std::to_string(a) + "," + std::to_string(b) + ")");
          }
      }
    }
    for (int t = 0; t < 100; ++t) {
      const auto x = random_matrix(n, rng, 0.0, 1.0);
      const auto y = random_matrix(n, rng, 0.0, 1.0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto g = oracle.supergradient_query(i, x);
        double lin = oracle.value_query(i, x);
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b) lin += g(a, b) * (y(a, b) - x(a, b));
        const double slack = oracle.value_query(i, y) - lin;
        worst_slack = std::max(worst_slack, slack);
        if (slack > 1e-7) out.fail(name + " supergradient inequality");
      }
    }
  }
  out.detail << "worst relative derivative error " << worst_rel
             << ", worst inequality excess " << worst_slack;
  return out;
}

// ---------------------------------------------------------------------------

Outcome attainability() {
  Outcome out;
  Rng rng(707);
  const double eps = 0.05;
  const auto families = certified_families();
  std::map<std::pair<std::size_t, std::string>, std::vector<GridColumn>> grids;
  std::size_t attained = 0, refused = 0, dominated = 0;
  for (int t = 0; t < 50; ++t) {
    const auto& [name, inst] = families[static_cast<std::size_t>(t) % families.size()];
    const std::size_t fam = static_cast<std::size_t>(t) % families.size();
    const std::size_t n = inst.size();
    // Pairs keep the gadget grid small; the others also get triples.
    const std::size_t k = name == "gadget" ? 2 : static_cast<std::size_t>(rng.uniform_int(2, 3));
    std::vector<std::size_t> members;
    while (members.size() < k) {
      const auto a = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
      if (std::find(members.begin(), members.end(), a) == members.end()) members.push_back(a);
    }
    const Coalition s(members);

    // Random exchange on S, with negative-utility members silenced.
    ExchangeMatrix x(n);
    const double scale = rng.uniform();
    for (std::size_t a : s.members())
      for (std::size_t b : s.members())
        if (a != b) x.set(a, b, scale * rng.uniform());
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t a : s.members()) {
        if (utility(inst, a, x) >= 0) continue;
        for (std::size_t b : s.members())
          if (a != b) x.set(a, b, 0.0);
        changed = true;
      }
    }
    std::vector<double> v;
    for (std::size_t a : s.members()) v.push_back(utility(inst, a, x));

    const auto r = attainable(inst, s, v, eps);
    bool ok = r.attainable && r.witness.has_value();
    if (ok)
      for (std::size_t q = 0; q < s.size(); ++q)
        ok = ok && utility(inst, s[q], *r.witness) >= v[q] - eps;
    if (ok)
      ++attained;
    else
      out.fail(name + " profile " + std::to_string(t) + " not attained");

    auto inflated = v;
    for (double& u : inflated) u += 2 * inst.payoff_bound();
    if (!attainable(inst, s, inflated, eps).attainable)
      ++refused;
    else
      out.fail(name + " inflated profile " + std::to_string(t) + " attained");

    auto& grid = grids[{fam, s.to_string()}];
    if (grid.empty()) grid = enumerate_grid(inst, s, eps);
    const bool dom = std::any_of(grid.begin(), grid.end(), [&](const GridColumn& c) {
      for (std::size_t q = 0; q < s.size(); ++q)
        if (c.utilities[q] < v[q] - 2 * eps) return false;
      return true;
    });
    if (dom)
      ++dominated;
    else
      out.fail(name + " profile " + std::to_string(t) + " not dominated by the grid");
  }
  out.detail << attained << "/50 attainable, " << refused << "/50 inflated refused, "
             << dominated << "/50 dominated within 2 eps";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"counterexample blocking suite", counterexample_cases},
      {"road solve is unblocked", road_stability},
      {"Scarf brute-force equivalence", scarf_brute_force},
      {"epsilon-core certificate", epsilon_certificate},
      {"gadget matching pipeline", gadget_pipeline},
      {"first-order oracle", first_order_oracle},
      {"attainability soundness", attainability},
  };
  int failures = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    Outcome o;
    try {
      o = criteria[c].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failures += !o.pass;
    std::printf("[%s] criterion %zu: %s -- %s\n", o.pass ? "PASS" : "FAIL", c + 1,
                criteria[c].first, o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
