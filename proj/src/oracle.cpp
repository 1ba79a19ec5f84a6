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

#include "dexcore/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "ascent.hpp"
#include "dexcore/errors.hpp"

namespace dexcore {

namespace {

using detail::PairList;

void require_certified(const Instance& inst) {
  if (!inst.certified())
    throw Unsupported("instance '" + inst.label() +
                      "' is not concave/convex certified; attainability "
                      "needs a concave objective");
}

ExchangeMatrix ones_on(const Coalition& s, std::size_t n) {
  ExchangeMatrix x(n);
  for (std::size_t a : s.members())
    for (std::size_t b : s.members())
      if (a != b) x.set(a, b, 1.0);
  return x;
}

// Payoff of i when every other member of S sends everything: an upper
// bound on u_i for any exchange supported on S.
double best_payoff(const Instance& inst, const Coalition& s, std::size_t i) {
  std::vector<double> in(inst.size(), 0.0);
  for (std::size_t j : s.members())
    if (j != i) in[j] = 1.0;
  return inst.agent(i).payoff(in);
}

std::vector<double> member_utilities(Oracle& oracle, const Coalition& s,
                                     const ExchangeMatrix& x) {
  std::vector<double> u(s.size());
  for (std::size_t k = 0; k < s.size(); ++k)
    u[k] = oracle.value_query(s[k], x);
  return u;
}

// Scales down the outgoing row of any member with negative utility (its
// cost falls, its payoff is untouched) until everyone is individually
// rational. Returns false if a few sweeps do not settle it.
bool repair_rationality(Oracle& oracle, const Coalition& s, ExchangeMatrix& x) {
  for (std::size_t sweep = 0; sweep < 4 * s.size() + 4; ++sweep) {
    bool changed = false;
    for (std::size_t i : s.members()) {
      if (oracle.value_query(i, x) >= 0.0) continue;
      changed = true;
      const ExchangeMatrix base = x;
      auto scaled = [&](double t) {
        ExchangeMatrix y = base;
        for (std::size_t j : s.members())
          if (j != i) y.set(i, j, base(i, j) * t);
        return y;
      };
      double lo = 0.0, hi = 1.0;  // u_i(lo) >= 0 > u_i(hi)
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (oracle.value_query(i, scaled(mid)) >= 0.0)
          lo = mid;
        else
          hi = mid;
      }
      x = scaled(lo);
    }
    if (!changed) return true;
  }
  for (std::size_t i : s.members())
    if (oracle.value_query(i, x) < 0.0) return false;
  return true;
}

AttainabilityResult solve_attainable(Oracle& oracle, const Coalition& s,
                                     std::span<const double> v,
                                     const OracleConfig& config,
                                     const ExchangeMatrix* hint) {
  const Instance& inst = oracle.instance();
  const std::size_t n = inst.size();
  require_certified(inst);
  if (v.size() != s.size())
    throw InvalidArgument("target profile has " + std::to_string(v.size()) +
                          " entries for a coalition of " +
                          std::to_string(s.size()));
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] >= n) throw InvalidArgument("coalition member out of range");
    if (!(std::isfinite(v[k]) && v[k] >= 0.0))
      throw InvalidArgument("target utilities must be finite and nonnegative");
  }

  const double tol = config.tolerance;
  AttainabilityResult result;
  if (std::all_of(v.begin(), v.end(), [](double t) { return t == 0.0; })) {
    result.attainable = true;
    result.witness = ExchangeMatrix(n);
    result.achieved = std::vector<double>(s.size(), 0.0);
    return result;
  }
  for (std::size_t k = 0; k < s.size(); ++k)
    if (best_payoff(inst, s, s[k]) < v[k] - tol) return result;

  oracle.record_optimization_call();
  detail::AscentProblem problem;
  problem.pairs = detail::coalition_pairs(s);
  problem.n = n;
  double total = 0.0;
  for (double t : v) total += t;
  problem.target = total;
  problem.eval = [&](const ExchangeMatrix& x, std::span<double> grad) {
    double obj = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double u = oracle.value_query(s[k], x);
      obj += std::min(u, v[k]);
      // At u == v the capped piece is active; its gradient is zero.
      if (u < v[k])
        oracle.accumulate_supergradient(s[k], x, problem.pairs, 1.0, grad);
    }
    return obj;
  };

  std::vector<ExchangeMatrix> starts;
  if (hint) starts.push_back(restrict(*hint, s));
  starts.push_back(ones_on(s, n));
  if (!hint) starts.push_back(ExchangeMatrix(n));
  auto best = detail::maximize(problem, starts, config.ascent);
  if (best.value < total - tol) return result;

  ExchangeMatrix x = best.best;
  if (!repair_rationality(oracle, s, x)) return result;
  auto achieved = member_utilities(oracle, s, x);
  for (std::size_t k = 0; k < s.size(); ++k)
    if (achieved[k] < v[k] - tol || achieved[k] < 0.0) return result;
  result.attainable = true;
  result.witness = std::move(x);
  result.achieved = std::move(achieved);
  return result;
}

using Point = std::vector<long>;

bool dominates(const Point& a, const Point& b) {
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k] < b[k]) return false;
  return true;
}

// Grid search with dominance memo. Attainable points are downward closed
// and infeasible points upward closed, so every answer propagates.
class GridSearch {
 public:
  GridSearch(Oracle& oracle, const Coalition& s, const OracleConfig& config)
      : oracle_(oracle), s_(s), config_(config) {}

  // Index into witnesses() of a dominating attainable point, or -1.
  long test(const Point& p) {
    for (std::size_t t = 0; t < good_.size(); ++t)
      if (dominates(good_[t].first, p)) return static_cast<long>(good_[t].second);
    for (const auto& q : bad_)
      if (dominates(p, q)) return -1;
    std::vector<double> v(p.size());
    for (std::size_t k = 0; k < p.size(); ++k)
      v[k] = static_cast<double>(p[k]) * config_.grid;
    const ExchangeMatrix* hint = witnesses_.empty() ? nullptr : &witnesses_.back();
    auto r = solve_attainable(oracle_, s_, v, config_, hint);
    if (!r.attainable) {
      bad_.push_back(p);
      return -1;
    }
    witnesses_.push_back(std::move(*r.witness));
    good_.emplace_back(p, witnesses_.size() - 1);
    return static_cast<long>(witnesses_.size() - 1);
  }

  const std::vector<std::pair<Point, std::size_t>>& good() const { return good_; }
  const std::vector<Point>& bad() const { return bad_; }
  const ExchangeMatrix& witness(std::size_t k) const { return witnesses_[k]; }

 private:
  Oracle& oracle_;
  const Coalition& s_;
  const OracleConfig& config_;
  std::vector<std::pair<Point, std::size_t>> good_;
  std::vector<Point> bad_;
  std::vector<ExchangeMatrix> witnesses_;
};

// Largest c in [lo, hi] with test(prefix, c) attainable, given that lo is.
std::pair<long, long> search_last(GridSearch& g, Point p, long lo, long hi,
                                  long lo_witness) {
  long best_w = lo_witness;
  while (lo < hi) {
    const long mid = lo + (hi - lo + 1) / 2;
    p.back() = mid;
    const long w = g.test(p);
    if (w >= 0) {
      lo = mid;
      best_w = w;
    } else {
      hi = mid - 1;
    }
  }
  return {lo, best_w};
}

}  // namespace

OracleConfig OracleConfig::for_grid(double grid) {
  OracleConfig c;
  c.grid = grid;
  c.tolerance = grid / 2.0;
  return c;
}

AttainabilityResult attainable(Oracle& oracle, const Coalition& s,
                               std::span<const double> v,
                               const OracleConfig& config) {
  return solve_attainable(oracle, s, v, config, nullptr);
}

AttainabilityResult attainable(const Instance& inst, const Coalition& s,
                               std::span<const double> v, double epsilon) {
  Oracle oracle(inst);
  OracleConfig config = OracleConfig::for_grid(epsilon);
  return attainable(oracle, s, v, config);
}

std::vector<GridColumn> enumerate_grid(Oracle& oracle, const Coalition& s,
                                       const OracleConfig& config) {
  const Instance& inst = oracle.instance();
  require_certified(inst);
  if (!(config.grid > 0.0)) throw InvalidArgument("grid spacing must be positive");
  const std::size_t k = s.size();
  const std::size_t n = inst.size();
  const double eta = config.grid;
  GridSearch search(oracle, s, config);

  auto make_column = [&](const Point& p, const ExchangeMatrix& w) {
    GridColumn col{s, std::vector<double>(k), std::vector<double>(k), w};
    for (std::size_t t = 0; t < k; ++t) {
      col.utilities[t] = static_cast<double>(p[t]) * eta;
      col.achieved[t] = utility(inst, s[t], w);
    }
    return col;
  };

  // Per-axis reach: the best grid level of each member alone.
  Point axis(k, 0);
  for (std::size_t t = 0; t < k; ++t) {
    const double reach =
        std::min(best_payoff(inst, s, s[t]), inst.payoff_bound()) +
        config.tolerance;
    const long cap = static_cast<long>(std::floor(reach / eta + 1e-9));
    if (cap <= 0) continue;
    Point p(k, 0);
    p[t] = 1;
    if (search.test(p) < 0) continue;
    long lo = 1, hi = cap;
    while (lo < hi) {
      const long mid = lo + (hi - lo + 1) / 2;
      p[t] = mid;
      if (search.test(p) >= 0)
        lo = mid;
      else
        hi = mid - 1;
    }
    axis[t] = lo;
  }

  if (std::all_of(axis.begin(), axis.end(), [](long a) { return a == 0; }))
    return {make_column(Point(k, 0), ExchangeMatrix(n))};

  if (long w = search.test(axis); w >= 0)
    return {make_column(axis, search.witness(static_cast<std::size_t>(w)))};

  double candidates = 1.0;
  for (long a : axis) candidates *= static_cast<double>(a + 1);
  if (candidates > static_cast<double>(config.grid_budget))
    throw BudgetExceeded("coalition " + s.to_string() + " has " +
                         std::to_string(static_cast<long long>(candidates)) +
                         " grid candidates, above the budget of " +
                         std::to_string(config.grid_budget));

  // Walk the prefixes (all coordinates but the last) in descending
  // lexicographic order, binary-searching the last coordinate.
  std::vector<std::pair<Point, std::size_t>> frontier;
  Point prefix(axis.begin(), axis.end() - 1);
  const long last_cap = axis.back();
  while (true) {
    long lo = -1, lo_w = -1, hi = last_cap;
    for (const auto& [q, w] : search.good())
      if (std::equal(prefix.begin(), prefix.end(), q.begin(),
                     [](long a, long b) { return b >= a; }) &&
          q.back() > lo) {
        lo = q.back();
        lo_w = static_cast<long>(w);
      }
    for (const auto& q : search.bad())
      if (std::equal(prefix.begin(), prefix.end(), q.begin(),
                     [](long a, long b) { return b <= a; }))
        hi = std::min(hi, q.back() - 1);
    Point p = prefix;
    p.push_back(0);
    if (lo < 0 && hi >= 0) {
      lo_w = search.test(p);
      if (lo_w >= 0) lo = 0;
    }
    if (lo >= 0) {
      hi = std::max(hi, lo);
      auto [c, w] = search_last(search, p, lo, hi, lo_w);
      p.back() = c;
      frontier.emplace_back(p, static_cast<std::size_t>(w));
    }
    // Descending odometer over the prefix.
    std::size_t t = prefix.size();
    while (t > 0 && prefix[t - 1] == 0) --t;
    if (t == 0) break;
    --prefix[t - 1];
    for (std::size_t r = t; r < prefix.size(); ++r) prefix[r] = axis[r];
  }

  std::vector<std::pair<Point, std::size_t>> points;
  if (config.prune_dominated) {
    for (const auto& cand : frontier) {
      bool dominated = false;
      for (const auto& other : frontier)
        if (other.first != cand.first && dominates(other.first, cand.first)) {
          dominated = true;
          break;
        }
      if (!dominated) points.push_back(cand);
    }
  } else {
    for (const auto& [p, w] : frontier)
      for (long c = p.back(); c >= 0; --c) {
        Point q = p;
        q.back() = c;
        points.emplace_back(std::move(q), w);
      }
  }
  std::sort(points.begin(), points.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  points.erase(std::unique(points.begin(), points.end(),
                           [](const auto& a, const auto& b) {
                             return a.first == b.first;
                           }),
               points.end());
  std::vector<GridColumn> out;
  for (const auto& [p, w] : points) out.push_back(make_column(p, search.witness(w)));
  return out;
}

std::vector<GridColumn> enumerate_grid(const Instance& inst, const Coalition& s,
                                       double epsilon) {
  Oracle oracle(inst);
  return enumerate_grid(oracle, s, OracleConfig::for_grid(epsilon));
}

ExchangeMatrix reduce_to_profile(Oracle& oracle, const Coalition& s,
                                 const ExchangeMatrix& x,
                                 std::span<const double> y, double epsilon) {
  if (y.size() != s.size())
    throw InvalidArgument("target profile does not match the coalition");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  ExchangeMatrix cur = x;
  for (std::size_t k = 0; k < s.size(); ++k)
    if (oracle.value_query(s[k], cur) < y[k])
      throw PreconditionError("target of agent " + std::to_string(s[k]) +
                              " exceeds its current utility");

  std::vector<bool> stuck(s.size(), false);
  const std::size_t cap = 1000 * s.size() * s.size();
  for (std::size_t step = 0; step < cap; ++step) {
    // Lowest member still epsilon above target.
    std::size_t pick = s.size();
    for (std::size_t k = 0; k < s.size() && pick == s.size(); ++k)
      if (!stuck[k] && oracle.value_query(s[k], cur) >= y[k] + epsilon) pick = k;
    if (pick == s.size()) return cur;
    const std::size_t i = s[pick];

    // The sender with the largest share into i.
    std::size_t from = i;
    for (std::size_t j : s.members())
      if (j != i && cur(j, i) > 0.0 && (from == i || cur(j, i) > cur(from, i)))
        from = j;
    if (from == i) {
      stuck[pick] = true;
      continue;
    }
    ExchangeMatrix trial = cur;
    trial.set(from, i, 0.0);
    if (oracle.value_query(i, trial) >= y[pick]) {
      cur = std::move(trial);
      continue;
    }
    double lo = 0.0, hi = cur(from, i);  // u_i(lo) < y <= u_i(hi)
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      trial.set(from, i, mid);
      if (oracle.value_query(i, trial) >= y[pick])
        hi = mid;
      else
        lo = mid;
    }
    cur.set(from, i, hi);
  }
  throw ToleranceExceeded("share reduction did not settle within " +
                          std::to_string(cap) + " steps");
}

ExchangeMatrix reduce_to_profile(const Instance& inst, const Coalition& s,
                                 const ExchangeMatrix& x,
                                 std::span<const double> y, double epsilon) {
  Oracle oracle(inst);
  return reduce_to_profile(oracle, s, x, y, epsilon);
}

}  // namespace dexcore
