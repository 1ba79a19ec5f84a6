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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "dexcore/errors.hpp"
#include "dexcore/instances.hpp"
#include "dexcore/scarf.hpp"
#include "helpers.hpp"

using namespace dexcore;
using dexcore::testing::micro_road;

namespace {

using Basis = std::vector<std::size_t>;

// Random pair in Scarf's standard form: identity own-row entries lowest,
// identity off-diagonal entries highest, out-of-coalition entries in
// between, genuine utilities in (0, 1), all row entries distinct.
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
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      if (k < n)
        U(i, k) = k == i ? 0.0 : 100.0 + rng.uniform();
      else
        U(i, k) = C(i, k) == 1.0 ? rng.uniform(0.001, 1.0) : 10.0 + rng.uniform();
    }
  return MatrixPair::from_raw(C, U);
}

bool ordinal(const MatrixPair& p, const Basis& b) {
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

bool cardinal(const MatrixPair& p, const Basis& b) {
  Eigen::MatrixXd cb(p.n, p.n);
  for (std::size_t t = 0; t < b.size(); ++t) cb.col(t) = p.C.col(b[t]);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(cb);
  if (!lu.isInvertible()) return false;
  const Eigen::VectorXd x = lu.solve(Eigen::VectorXd::Ones(p.n));
  return x.minCoeff() >= -1e-9;
}

std::vector<Basis> subsets(std::size_t m, std::size_t k) {
  std::vector<Basis> out;
  for (const auto& c : coalitions_up_to(m, k, k)) out.emplace_back(c.members().begin(), c.members().end());
  return out;
}

Basis sorted(Basis b) {
  std::sort(b.begin(), b.end());
  return b;
}

}  // namespace

TEST_CASE("cardinal pivot from the identity breaks the tie lexicographically") {
  Eigen::MatrixXd C(2, 3), U(2, 3);
  C << 1, 0, 1, 0, 1, 1;
  U << 0, 200, 0.5, 200, 0, 0.5;
  const auto p = MatrixPair::from_raw(C, U);
  const Basis b{0, 1};
  const auto [next, left] = cardinal_pivot(p, b, 2);
  CHECK(left == 1);
  CHECK(sorted(next) == Basis{0, 2});
  CHECK(is_cardinal_basis(p, next));
}

TEST_CASE("entering a copy of a basis column swaps it out") {
  Eigen::MatrixXd C(2, 3), U(2, 3);
  C << 1, 0, 1, 0, 1, 0;
  U << 0, 200, 0.5, 200, 0, 100;
  const auto p = MatrixPair::from_raw(C, U);
  const Basis b{0, 1};
  const auto [next, left] = cardinal_pivot(p, b, 2);
  CHECK(left == 0);
  CHECK(sorted(next) == Basis{1, 2});
}

TEST_CASE("cardinal pivots keep a nonnegative basic solution") {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto p = random_pair(3, 6, rng);
    Basis b{0, 1, 2};
    for (std::size_t k = 3; k < 6; ++k) {
      if (std::find(b.begin(), b.end(), k) != b.end()) continue;
      auto [next, left] = cardinal_pivot(p, b, k);
      CHECK(cardinal(p, next));
      Eigen::MatrixXd cb(3, 3);
      for (std::size_t j = 0; j < 3; ++j) cb.col(j) = p.C.col(next[j]);
      const Eigen::VectorXd x = cb.lu().solve(Eigen::VectorXd::Ones(3));
      CHECK((cb * x - Eigen::VectorXd::Ones(3)).norm() <= 1e-9);
      CHECK(x.minCoeff() >= -1e-12);
      b = next;
    }
  }
}

TEST_CASE("ordinal pivot finds the unique replacement") {
  Rng rng(5);
  int checked = 0;
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = t % 2 ? 3 : 2;
    const std::size_t m = n == 2 ? 3 : 5;
    const auto p = random_pair(n, m, rng);
    for (const auto& o : subsets(m, n)) {
      if (!ordinal(p, o)) continue;
      for (std::size_t leave : o) {
        Basis rest;
        for (std::size_t j : o)
          if (j != leave) rest.push_back(j);
        // Scarf's exception: only identity columns remain.
        if (std::all_of(rest.begin(), rest.end(), [&](std::size_t j) { return j < n; }))
          continue;
        std::set<std::size_t> brute;
        for (std::size_t k = 0; k < m; ++k) {
          if (k == leave || std::find(rest.begin(), rest.end(), k) != rest.end()) continue;
          auto cand = rest;
          cand.push_back(k);
          if (ordinal(p, cand)) brute.insert(k);
        }
        const auto [next, came] = ordinal_pivot(p, o, leave);
        CHECK(brute == std::set<std::size_t>{came});
        CHECK(ordinal(p, next));
        CHECK(is_ordinal_basis(p, next));
        // Stepping back restores the original basis.
        const auto [back, again] = ordinal_pivot(p, next, came);
        CHECK(again == leave);
        CHECK(sorted(back) == sorted(o));
        ++checked;
      }
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("scarf_solve matches a brute-force Scarf basis") {
  Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = 5 + static_cast<std::size_t>(t % 3);
    const auto p = random_pair(3, m, rng);
    std::set<Basis> valid;
    for (const auto& b : subsets(m, 3))
      if (cardinal(p, b) && ordinal(p, b)) valid.insert(b);
    const auto sol = scarf_solve(p);
    CHECK(valid.count(sol.basis) == 1);
    CHECK(sol.iterations >= 1);
    Eigen::VectorXd lhs = Eigen::VectorXd::Zero(3);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(sol.delta[k] >= 0.0);
      lhs += sol.delta[k] * p.C.col(sol.basis[k]);
    }
    CHECK((lhs - Eigen::VectorXd::Ones(3)).norm() <= 1e-9);
  }
}

TEST_CASE("one extra zero column gives the zero exchange") {
  const auto inst = make_linear_instance({{0, 0}, {0, 0}}, {{0, 0.1}, {0.1, 0}});
  const auto p = build_matrices(inst, 2, 0.1);
  CHECK(p.m() == 3);
  const auto sol = scarf_solve(p);
  CHECK(sol.iterations >= 1);
  CHECK(sol.exchange(0, 1) == 0.0);
  CHECK(sol.exchange(1, 0) == 0.0);
}

TEST_CASE("built matrices have the expected shape") {
  const auto inst = make_road_instance(micro_road());
  const auto p = build_matrices(inst, 2, 0.1);
  REQUIRE(p.m() > 2);
  CHECK(p.C.leftCols(2).isIdentity());
  bool found = false;
  for (std::size_t k = 2; k < p.m(); ++k) {
    const auto& info = p.columns[k];
    REQUIRE(info.coalition);
    CHECK(p.C.col(k).sum() == doctest::Approx(static_cast<double>(info.coalition->size())));
    if (info.grid == std::vector<double>{0.1, 0.1}) {
      found = true;
      for (std::size_t i = 0; i < 2; ++i)
        CHECK(utility(inst, i, *info.witness) >= 0.1 - 0.05);
    }
  }
  CHECK(found);
  // Each row is free of repeats.
  for (std::size_t r = 0; r < 2; ++r) {
    std::set<double> seen;
    for (std::size_t k = 0; k < p.m(); ++k) seen.insert(p.U(r, k));
    CHECK(seen.size() == p.m());
  }
}

TEST_CASE("rows of a built matrix pair are distinct on a larger instance") {
  const auto inst = make_road_instance(random_road_params(synthetic200(), 4, 2));
  const auto p = build_matrices(inst, 3, 0.1);
  for (std::size_t r = 0; r < p.n; ++r) {
    std::set<double> seen;
    for (std::size_t k = 0; k < p.m(); ++k) {
      seen.insert(p.U(r, k));
      if (k >= p.n && p.C(r, k) == 0.0) CHECK(p.U(r, k) >= p.big_m);
    }
    CHECK(seen.size() == p.m());
  }
  CHECK_THROWS_AS(build_matrices(make_counterexample(0.01), 2, 0.1), Unsupported);
  CHECK_THROWS_AS(build_matrices(inst, 1, 0.1), InvalidArgument);
}

TEST_CASE("solutions pass both lemma conditions and the certificate") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto inst = make_road_instance(random_road_params(synthetic200(), 4, seed));
    const double eps = 0.1;
    BuildConfig cfg;
    cfg.max_coalition = 3;
    cfg.oracle = OracleConfig::for_grid(eps / 2);
    const auto p = build_matrices(inst, cfg);
    const auto sol = scarf_solve(p);
    CHECK(cardinal(p, sol.basis));
    CHECK(ordinal(p, sol.basis));
    CHECK(certificate_gap(p, inst, sol.exchange) <= eps + 1e-6);
  }
}

TEST_CASE("assembly over disjoint coalitions is block diagonal") {
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(4, 6), U = Eigen::MatrixXd::Zero(4, 6);
  C.leftCols(4).setIdentity();
  C(0, 4) = C(1, 4) = 1;
  C(2, 5) = C(3, 5) = 1;
  auto p = MatrixPair::from_raw(C, U);
  p.columns[4].witness = ExchangeMatrix::from_rows(
      {{0, 0.3, 0, 0}, {0.6, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}});
  p.columns[5].witness = ExchangeMatrix::from_rows(
      {{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0.9}, {0, 0, 0.2, 0}});
  // Identity columns ride along with zero weight.
  const auto x = assemble_exchange(p, Basis{0, 1, 4, 5},
                                   std::vector<double>{0.0, 0.0, 1.0, 1.0});
  CHECK(x(0, 1) == 0.3);
  CHECK(x(1, 0) == 0.6);
  CHECK(x(2, 3) == 0.9);
  CHECK(x(3, 2) == 0.2);
  CHECK(x(0, 2) == 0.0);
  const auto zero = assemble_exchange(p, Basis{0, 1, 2, 3}, std::vector<double>(4, 1.0));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(zero(i, j) == 0.0);
}

TEST_CASE("micro road exchange dominates its basis columns") {
  const auto inst = make_road_instance(micro_road(0.01));
  const double eps = 0.1;
  const auto p = build_matrices(inst, 2, eps);
  const auto sol = scarf_solve(p);
  for (std::size_t k = 0; k < sol.basis.size(); ++k) {
    const auto& info = p.columns[sol.basis[k]];
    if (!info.coalition) continue;
    for (std::size_t t = 0; t < info.coalition->size(); ++t)
      CHECK(utility(inst, (*info.coalition)[t], sol.exchange) >= info.grid[t] - eps);
  }
}

TEST_CASE("pivot trace is deterministic") {
  const auto inst = make_road_instance(random_road_params(synthetic200(), 4, 9));
  BuildConfig one, many;
  one.threads = 1;
  many.threads = 4;
  const auto a = scarf_solve(build_matrices(inst, one));
  const auto b = scarf_solve(build_matrices(inst, many));
  CHECK(a.trace == b.trace);
  CHECK(a.basis == b.basis);
}

TEST_CASE("the iteration cap is enforced") {
  Rng rng(17);
  const auto p = random_pair(3, 7, rng);
  const auto sol = scarf_solve(p);
  if (sol.iterations > 1) CHECK_THROWS_AS(scarf_solve(p, 1), ToleranceExceeded);
}
