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

#include "dexcore/scarf.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "dexcore/errors.hpp"

namespace dexcore {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Eigen::MatrixXd basis_matrix(const MatrixPair& pair,
                             std::span<const std::size_t> basis) {
  Eigen::MatrixXd cb(pair.n, basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k)
    cb.col(static_cast<Eigen::Index>(k)) =
        pair.C.col(static_cast<Eigen::Index>(basis[k]));
  return cb;
}

void check_basis(const MatrixPair& pair, std::span<const std::size_t> basis) {
  if (basis.size() != pair.n)
    throw InvalidArgument("basis must hold exactly n columns");
  for (std::size_t j : basis)
    if (j >= pair.m()) throw InvalidArgument("basis column out of range");
}

// For each row, the basis column attaining its minimum.
std::vector<std::size_t> row_minimizers(const MatrixPair& pair,
                                        std::span<const std::size_t> basis) {
  std::vector<std::size_t> out(pair.n);
  for (std::size_t i = 0; i < pair.n; ++i) {
    std::size_t best = basis[0];
    for (std::size_t j : basis)
      if (pair.U(i, j) < pair.U(i, best)) best = j;
    out[i] = best;
  }
  return out;
}

}  // namespace

MatrixPair MatrixPair::from_raw(Eigen::MatrixXd C, Eigen::MatrixXd U) {
  const auto n = C.rows();
  if (U.rows() != n || U.cols() != C.cols() || C.cols() <= n)
    throw InvalidArgument("C and U must both be n x m with m > n");
  if (!C.leftCols(n).isIdentity())
    throw InvalidArgument("the first n columns of C must be the identity");
  MatrixPair p;
  p.n = static_cast<std::size_t>(n);
  p.C = std::move(C);
  p.U = std::move(U);
  p.columns.resize(p.m());
  p.big_m = p.U.maxCoeff();
  return p;
}

MatrixPair build_matrices(const Instance& inst, const BuildConfig& config) {
  const auto t0 = Clock::now();
  const std::size_t n = inst.size();
  if (config.max_coalition < 2)
    throw InvalidArgument("coalition size bound must be at least 2");
  if (!inst.certified())
    throw Unsupported("instance '" + inst.label() +
                      "' is not concave/convex certified; cannot build the "
                      "utility matrix");
  const double eta = config.oracle.grid;

  // Singletons only ever attain the zero vector, which duplicates an
  // identity column; they are left out.
  const auto coalitions = coalitions_up_to(n, 2, config.max_coalition);
  std::vector<std::vector<GridColumn>> grids(coalitions.size());
  std::vector<QueryCounters> counters(coalitions.size());
  std::vector<std::exception_ptr> errors(coalitions.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    Oracle oracle(inst);
    for (std::size_t c; (c = next.fetch_add(1)) < coalitions.size();) {
      oracle.reset();
      try {
        grids[c] = enumerate_grid(oracle, coalitions[c], config.oracle);
      } catch (...) {
        errors[c] = std::current_exception();
      }
      counters[c] = oracle.counters();
    }
  };
  std::size_t threads = config.threads ? config.threads
                                       : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, coalitions.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  MatrixPair pair;
  pair.n = n;
  for (const auto& q : counters) pair.counters += q;
  std::size_t m = n;
  for (const auto& g : grids) m += g.size();
  if (m > config.column_budget)
    throw BudgetExceeded("utility matrix would have " + std::to_string(m) +
                         " columns, above the budget of " +
                         std::to_string(config.column_budget));

  pair.C = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                 static_cast<Eigen::Index>(m));
  pair.U = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                 static_cast<Eigen::Index>(m));
  pair.columns.resize(m);
  for (std::size_t i = 0; i < n; ++i) pair.C(i, i) = 1.0;
  std::size_t k = n;
  for (auto& g : grids)
    for (auto& col : g) {
      for (std::size_t t = 0; t < col.coalition.size(); ++t)
        pair.C(col.coalition[t], k) = 1.0;
      pair.columns[k] = {col.coalition, std::move(col.witness),
                         std::move(col.utilities), std::move(col.achieved)};
      ++k;
    }

  const double bound = std::max(inst.payoff_bound(), eta);
  pair.big_m = 1000.0 * bound * static_cast<double>(n);
  const double spread = 10.0 * static_cast<double>(m) * static_cast<double>(n) *
                        (bound / eta);
  auto big = [&](std::size_t r, std::size_t c, double tier) {
    return tier * pair.big_m *
           (1.0 + static_cast<double>(r * m + c) / spread);
  };

  for (std::size_t r = 0; r < n; ++r) {
    // Genuine entries of row r, ranked for the tie-break.
    struct Entry {
      double grid, achieved;
      std::size_t col;
    };
    std::vector<Entry> genuine;
    for (std::size_t c = 0; c < m; ++c) {
      if (c < n) {
        pair.U(r, c) = c == r ? 0.0 : big(r, c, 2.0);
        continue;
      }
      const auto& info = pair.columns[c];
      if (!info.coalition->contains(r)) {
        pair.U(r, c) = big(r, c, 1.0);
        continue;
      }
      const std::size_t pos = info.coalition->position(r);
      genuine.push_back({info.grid[pos], info.achieved[pos], c});
    }
    std::sort(genuine.begin(), genuine.end(), [](const Entry& a, const Entry& b) {
      if (a.grid != b.grid) return a.grid < b.grid;
      if (a.achieved != b.achieved) return a.achieved < b.achieved;
      return a.col < b.col;
    });
    // Equal grid values are spread over (0, eta/4) by rank, so order
    // follows the witness utilities and no entry of the row repeats.
    for (std::size_t a = 0; a < genuine.size();) {
      std::size_t b = a;
      while (b < genuine.size() && genuine[b].grid == genuine[a].grid) ++b;
      const double count = static_cast<double>(b - a);
      for (std::size_t t = a; t < b; ++t)
        pair.U(r, genuine[t].col) =
            genuine[t].grid +
            0.25 * eta * static_cast<double>(t - a + 1) / (count + 1.0);
      a = b;
    }
  }
  pair.build_seconds = seconds_since(t0);
  return pair;
}

MatrixPair build_matrices(const Instance& inst, std::size_t s, double epsilon) {
  BuildConfig config;
  config.max_coalition = s;
  config.oracle = OracleConfig::for_grid(epsilon);
  return build_matrices(inst, config);
}

std::pair<std::vector<std::size_t>, std::size_t> cardinal_pivot(
    const MatrixPair& pair, std::span<const std::size_t> basis,
    std::size_t entering) {
  check_basis(pair, basis);
  if (entering >= pair.m()) throw InvalidArgument("entering column out of range");
  const std::size_t n = pair.n;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix(pair, basis));
  const Eigen::MatrixXd inv = lu.inverse();
  const Eigen::VectorXd x = inv * Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  const Eigen::VectorXd y = inv * pair.C.col(static_cast<Eigen::Index>(entering));

  constexpr double kPivotTol = 1e-9;
  constexpr double kTieTol = 1e-9;
  std::optional<std::size_t> best;
  for (std::size_t r = 0; r < n; ++r) {
    if (y(r) <= kPivotTol) continue;
    if (!best) {
      best = r;
      continue;
    }
    // Lexicographic comparison of [x_r, inv_r] / y_r against the best row.
    const double yr = y(r), yb = y(*best);
    auto entry = [&](std::size_t row, std::size_t t) {
      return t == 0 ? x(row) : inv(row, t - 1);
    };
    for (std::size_t t = 0; t <= n; ++t) {
      const double a = entry(r, t) / yr, b = entry(*best, t) / yb;
      if (a < b - kTieTol) {
        best = r;
        break;
      }
      if (a > b + kTieTol) break;
    }
  }
  if (!best)
    throw StructuralError("cardinal pivot found no positive ratio for column " +
                          std::to_string(entering));
  std::vector<std::size_t> out(basis.begin(), basis.end());
  const std::size_t leaving = out[*best];
  out[*best] = entering;
  return {out, leaving};
}

std::pair<std::vector<std::size_t>, std::size_t> ordinal_pivot(
    const MatrixPair& pair, std::span<const std::size_t> basis,
    std::size_t leaving) {
  check_basis(pair, basis);
  const std::size_t n = pair.n;
  const auto mins = row_minimizers(pair, basis);
  auto row_of = [&](std::size_t col) {
    for (std::size_t i = 0; i < n; ++i)
      if (mins[i] == col) return i;
    throw StructuralError("column " + std::to_string(col) +
                          " minimizes no row of the ordinal basis");
  };
  const std::size_t i_l = row_of(leaving);

  std::vector<std::size_t> rest;
  for (std::size_t j : basis)
    if (j != leaving) rest.push_back(j);
  if (rest.size() + 1 != basis.size())
    throw InvalidArgument("leaving column is not in the ordinal basis");
  std::size_t j_r = rest[0];
  for (std::size_t j : rest)
    if (pair.U(i_l, j) < pair.U(i_l, j_r)) j_r = j;
  const std::size_t i_r = row_of(j_r);

  std::vector<double> rest_min(n);
  for (std::size_t i = 0; i < n; ++i) {
    rest_min[i] = pair.U(i, rest[0]);
    for (std::size_t j : rest) rest_min[i] = std::min(rest_min[i], pair.U(i, j));
  }
  std::optional<std::size_t> pick;
  for (std::size_t k = 0; k < pair.m(); ++k) {
    if (std::find(rest.begin(), rest.end(), k) != rest.end()) continue;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      if (i != i_r && !(pair.U(i, k) > rest_min[i])) ok = false;
    if (ok && (!pick || pair.U(i_r, k) > pair.U(i_r, *pick))) pick = k;
  }
  if (!pick)
    throw StructuralError("ordinal pivot has no candidate column; the utility "
                          "matrix violates non-degeneracy");
  rest.push_back(*pick);
  return {rest, *pick};
}

ScarfSolution scarf_solve(const MatrixPair& pair, std::size_t iteration_cap) {
  const std::size_t n = pair.n, m = pair.m();
  if (m <= n) throw InvalidArgument("Scarf needs at least one non-identity column");
  if (iteration_cap == 0) iteration_cap = 50 * m;

  ScarfSolution sol;
  std::vector<std::size_t> card(n), ord;
  std::iota(card.begin(), card.end(), 0);
  std::size_t first = n;
  for (std::size_t k = n + 1; k < m; ++k)
    if (pair.U(0, k) > pair.U(0, first)) first = k;
  for (std::size_t i = 1; i < n; ++i) ord.push_back(i);
  ord.push_back(first);

  std::size_t entering = first;
  while (true) {
    if (sol.iterations >= iteration_cap)
      throw ToleranceExceeded("Scarf pivoting hit the iteration cap of " +
                              std::to_string(iteration_cap));
    ++sol.iterations;
    auto t0 = Clock::now();
    auto [next_card, left] = cardinal_pivot(pair, card, entering);
    sol.cardinal_seconds += seconds_since(t0);
    sol.trace.push_back({'c', entering, left});
    card = std::move(next_card);
    if (left == 0) break;

    t0 = Clock::now();
    auto [next_ord, came] = ordinal_pivot(pair, ord, left);
    sol.ordinal_seconds += seconds_since(t0);
    sol.trace.push_back({'o', came, left});
    ord = std::move(next_ord);
    if (came == 0) break;
    entering = came;
  }

  std::sort(card.begin(), card.end());
  sol.basis = card;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix(pair, card));
  const Eigen::VectorXd delta =
      lu.solve(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)));
  for (std::size_t k = 0; k < n; ++k)
    sol.delta.push_back(std::max(delta(static_cast<Eigen::Index>(k)), 0.0));
  sol.exchange = assemble_exchange(pair, sol.basis, sol.delta);
  return sol;
}

ExchangeMatrix assemble_exchange(const MatrixPair& pair,
                                 std::span<const std::size_t> basis,
                                 std::span<const double> delta) {
  check_basis(pair, basis);
  if (delta.size() != basis.size())
    throw InvalidArgument("need one weight per basis column");
  const std::size_t n = pair.n;
  std::vector<double> sum(n * n, 0.0);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (delta[k] < -1e-9) throw InvalidArgument("negative basis weight");
    const auto& w = pair.columns[basis[k]].witness;
    if (!w) continue;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) sum[i * n + j] += delta[k] * (*w)(i, j);
  }
  ExchangeMatrix x(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double v = sum[i * n + j];
      if (v > 1.0 + 1e-9)
        throw ToleranceExceeded("assembled share exceeds 1 by " +
                                std::to_string(v - 1.0));
      x.set(i, j, std::clamp(v, 0.0, 1.0));
    }
  return x;
}

bool is_cardinal_basis(const MatrixPair& pair, std::span<const std::size_t> basis,
                       double tol) {
  check_basis(pair, basis);
  const Eigen::MatrixXd cb = basis_matrix(pair, basis);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(cb);
  if (!lu.isInvertible()) return false;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(pair.n));
  const Eigen::VectorXd x = lu.solve(ones);
  if ((cb * x - ones).norm() > 1e-9) return false;
  return x.minCoeff() >= -tol;
}

bool is_ordinal_basis(const MatrixPair& pair, std::span<const std::size_t> basis) {
  check_basis(pair, basis);
  std::vector<double> mins(pair.n);
  for (std::size_t i = 0; i < pair.n; ++i) {
    mins[i] = pair.U(i, basis[0]);
    for (std::size_t j : basis) mins[i] = std::min(mins[i], pair.U(i, j));
  }
  for (std::size_t k = 0; k < pair.m(); ++k) {
    bool covered = false;
    for (std::size_t i = 0; i < pair.n && !covered; ++i)
      covered = pair.U(i, k) <= mins[i];
    if (!covered) return false;
  }
  return true;
}

double certificate_gap(const MatrixPair& pair, const Instance& inst,
                       const ExchangeMatrix& x) {
  std::vector<double> u(pair.n);
  for (std::size_t i = 0; i < pair.n; ++i) u[i] = utility(inst, i, x);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pair.m(); ++k) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pair.n; ++i) best = std::min(best, pair.U(i, k) - u[i]);
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace dexcore
