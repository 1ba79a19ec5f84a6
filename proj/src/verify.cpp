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

#include "dexcore/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "ascent.hpp"
#include "dexcore/errors.hpp"

namespace dexcore {

namespace {

using detail::PairList;

// Depth-first walk over the deviation grid of one coalition. Each member's
// utility is bounded above by filling its unfixed incoming shares with 1
// and unfixed outgoing shares with 0; a subtree is cut as soon as some
// member cannot gain more than alpha.
class GridWalk {
 public:
  GridWalk(const Instance& inst, const Coalition& s,
           const std::vector<double>& base, const VerifyConfig& config)
      : inst_(inst), s_(s), base_(base), config_(config) {
    const std::size_t n = inst.size();
    // Variables grouped so that each member's shares complete early.
    std::vector<std::vector<bool>> taken(n, std::vector<bool>(n, false));
    for (std::size_t a : s.members())
      for (std::size_t b : s.members()) {
        if (a == b) continue;
        for (auto [p, q] : {std::pair{a, b}, std::pair{b, a}})
          if (!taken[p][q]) {
            taken[p][q] = true;
            pairs_.emplace_back(p, q);
          }
      }
    const long steps = std::lround(1.0 / config.grid_step);
    if (steps < 1 || std::abs(steps * config.grid_step - 1.0) > 1e-9)
      throw InvalidArgument("grid step must divide 1");
    for (long t = steps; t >= 0; --t)
      levels_.push_back(static_cast<double>(t) / static_cast<double>(steps));
    fixed_.assign(n * n, -1.0);
    in_.assign(n, 0.0);
    out_.assign(n, 0.0);
  }

  std::optional<ExchangeMatrix> run() {
    weight_ = 1.0;
    done_ = 0.0;
    found_.reset();
    descend(0, 1.0);
    return found_;
  }

  double coverage() const { return found_ ? 1.0 : done_; }
  bool exhausted() const { return nodes_ > config_.node_budget; }
  std::size_t nodes() const { return nodes_; }

 private:
  double bound(std::size_t i) {
    const std::size_t n = inst_.size();
    std::fill(in_.begin(), in_.end(), 0.0);
    std::fill(out_.begin(), out_.end(), 0.0);
    for (std::size_t j : s_.members()) {
      if (j == i) continue;
      const double fin = fixed_[j * n + i], fout = fixed_[i * n + j];
      in_[j] = fin < 0.0 ? 1.0 : fin;
      out_[j] = fout < 0.0 ? 0.0 : fout;
    }
    const auto& a = inst_.agent(i);
    return a.payoff(in_) - a.cost(out_);
  }

  bool promising() {
    for (std::size_t k = 0; k < s_.size(); ++k)
      if (!(bound(s_[k]) - base_[k] > config_.alpha)) return false;
    return true;
  }

  void descend(std::size_t depth, double share) {
    if (found_ || exhausted()) return;
    ++nodes_;
    if (!promising()) {
      done_ += share;
      return;
    }
    if (depth == pairs_.size()) {
      ExchangeMatrix y(inst_.size());
      for (auto [p, q] : pairs_) y.set(p, q, fixed_[p * inst_.size() + q]);
      found_ = std::move(y);
      return;
    }
    const auto [p, q] = pairs_[depth];
    const double child = share / static_cast<double>(levels_.size());
    for (double level : levels_) {
      fixed_[p * inst_.size() + q] = level;
      descend(depth + 1, child);
      if (found_ || exhausted()) break;
    }
    fixed_[p * inst_.size() + q] = -1.0;
  }

  const Instance& inst_;
  const Coalition& s_;
  const std::vector<double>& base_;
  const VerifyConfig& config_;
  PairList pairs_;
  std::vector<double> levels_;
  std::vector<double> fixed_;
  std::vector<double> in_, out_;
  std::optional<ExchangeMatrix> found_;
  double weight_ = 1.0, done_ = 0.0;
  std::size_t nodes_ = 0;
};

std::optional<BlockingCertificate> certify(const Instance& inst,
                                           const Coalition& s,
                                           const std::vector<double>& base,
                                           const ExchangeMatrix& deviation,
                                           double alpha) {
  Oracle oracle(inst);
  BlockingCertificate cert{s, restrict(deviation, s), {}};
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double gain = oracle.value_query(s[k], cert.deviation) - base[k];
    if (!(gain > alpha)) return std::nullopt;
    cert.improvements.push_back(gain);
  }
  return cert;
}

}  // namespace

VerifyResult search_coalition(const Instance& inst, const ExchangeMatrix& x,
                              const Coalition& s, const VerifyConfig& config) {
  if (x.size() != inst.size())
    throw InvalidArgument("exchange size does not match the instance");
  if (!(config.alpha >= 0.0)) throw InvalidArgument("alpha must be nonnegative");
  const std::size_t n = inst.size();
  std::vector<double> base(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) base[k] = utility(inst, s[k], x);

  VerifyResult result;
  result.coalitions_checked = 1;
  if (s.size() == 1) {
    result.certificate = certify(inst, s, base, ExchangeMatrix(n), config.alpha);
    return result;
  }

  if (inst.certified()) {
    // min_i (u_i(y) - u_i(x)) is concave in y; climb it directly.
    Oracle oracle(inst);
    detail::AscentProblem problem;
    problem.pairs = detail::coalition_pairs(s);
    problem.n = n;
    problem.target = config.alpha + 1e-9;
    problem.eval = [&](const ExchangeMatrix& y, std::span<double> grad) {
      std::size_t worst = 0;
      double gap = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < s.size(); ++k) {
        const double g = oracle.value_query(s[k], y) - base[k];
        if (g < gap) {
          gap = g;
          worst = k;
        }
      }
      oracle.accumulate_supergradient(s[worst], y, problem.pairs, 1.0, grad);
      return gap;
    };
    ExchangeMatrix ones(n);
    for (auto [a, b] : problem.pairs) ones.set(a, b, 1.0);
    const auto best = detail::maximize(
        problem, {ones, restrict(x, s), ExchangeMatrix(n)}, config.ascent);
    if (best.value > config.alpha) {
      result.certificate = certify(inst, s, base, best.best, config.alpha);
      if (result.certificate) return result;
    }
  }

  GridWalk walk(inst, s, base, config);
  auto hit = walk.run();
  result.grid_nodes = walk.nodes();
  result.coverage = walk.coverage();
  result.complete = !walk.exhausted();
  if (hit) result.certificate = certify(inst, s, base, *hit, config.alpha);
  return result;
}

VerifyResult find_blocking_coalition(const Instance& inst,
                                     const ExchangeMatrix& x,
                                     const VerifyConfig& config) {
  if (config.max_coalition < 1)
    throw InvalidArgument("coalition size bound must be at least 1");
  const auto coalitions = coalitions_up_to(inst.size(), 1, config.max_coalition);
  std::vector<VerifyResult> parts(coalitions.size());
  std::vector<bool> ran(coalitions.size(), false);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> first_hit{coalitions.size()};
  std::vector<std::exception_ptr> errors(coalitions.size());
  auto worker = [&] {
    for (std::size_t c; (c = next.fetch_add(1)) < coalitions.size();) {
      if (c > first_hit.load()) continue;
      try {
        parts[c] = search_coalition(inst, x, coalitions[c], config);
        ran[c] = true;
        if (parts[c].certificate) {
          std::size_t cur = first_hit.load();
          while (c < cur && !first_hit.compare_exchange_weak(cur, c)) {
          }
        }
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::clamp<std::size_t>(config.threads, 1, std::max<std::size_t>(1, coalitions.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  VerifyResult total;
  total.coverage = 0.0;
  std::size_t counted = 0;
  for (std::size_t c = 0; c < coalitions.size(); ++c) {
    if (errors[c]) std::rethrow_exception(errors[c]);
    if (!ran[c]) continue;
    ++counted;
    total.coalitions_checked += 1;
    total.grid_nodes += parts[c].grid_nodes;
    total.coverage += parts[c].coverage;
    total.complete = total.complete && parts[c].complete;
    if (parts[c].certificate) {
      total.certificate = std::move(parts[c].certificate);
      break;
    }
  }
  total.coverage = counted ? total.coverage / static_cast<double>(counted) : 1.0;
  return total;
}

bool CaseAnalysis::all_blocked() const {
  return std::all_of(cases.begin(), cases.end(),
                     [&](const CaseReport& c) { return c.coalition.has_value(); }) &&
         min_gain >= threshold;
}

CaseAnalysis enumerate_counterexample_cases(const Instance& inst) {
  const std::string family = inst.family();
  if (inst.size() != 3 || (family != "counterexample" && family != "concave-cost" &&
                           family != "convex-convex"))
    throw InvalidArgument("case analysis needs a three-agent counterexample");
  const double eps = inst.document().at("params").at("epsilon").get<double>();

  // Shares below 1 - eps buy no payoff under the threshold payoffs, so
  // each share is either 0 or in [1 - eps, 1]. With linear payoffs the
  // split is instead at eps versus 2 eps.
  std::vector<double> active{1.0 - eps, 1.0 - eps / 2.0, 1.0};
  std::vector<double> inactive{0.0};
  CaseAnalysis analysis;
  analysis.threshold = 0.125 - eps;
  if (family == "concave-cost") {
    active = {2.0 * eps, 0.5, 1.0};
    inactive = {0.0, eps / 2.0, eps};
    analysis.threshold = 0.125 - 3.0 * eps;
  }

  using Edges = std::vector<std::pair<std::size_t, std::size_t>>;
  const std::vector<std::pair<std::string, Edges>> patterns = {
      {"I: no shares", {}},
      {"II: 0<->1", {{0, 1}, {1, 0}}},
      {"II: 0<->2", {{0, 2}, {2, 0}}},
      {"II: 1<->2", {{1, 2}, {2, 1}}},
      {"III: 0->1->2->0", {{0, 1}, {1, 2}, {2, 0}}},
      {"III: 0->2->1->0", {{0, 2}, {2, 1}, {1, 0}}},
  };
  const Edges all_pairs = {{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}};

  const auto coalitions = coalitions_up_to(3, 1, 3);
  analysis.min_gain = std::numeric_limits<double>::infinity();
  for (const auto& [name, edges] : patterns) {
    // Every combination of sampled levels over the six shares.
    std::vector<const std::vector<double>*> levels;
    for (const auto& pr : all_pairs)
      levels.push_back(std::find(edges.begin(), edges.end(), pr) != edges.end()
                           ? &active
                           : &inactive);
    std::vector<ExchangeMatrix> samples;
    std::vector<std::size_t> idx(all_pairs.size(), 0);
    while (true) {
      ExchangeMatrix x(3);
      for (std::size_t t = 0; t < all_pairs.size(); ++t)
        x.set(all_pairs[t].first, all_pairs[t].second, (*levels[t])[idx[t]]);
      samples.push_back(std::move(x));
      std::size_t t = 0;
      while (t < idx.size() && ++idx[t] == levels[t]->size()) idx[t++] = 0;
      if (t == idx.size()) break;
    }
    std::vector<std::array<double, 3>> before;
    for (const auto& x : samples)
      before.push_back({utility(inst, 0, x), utility(inst, 1, x), utility(inst, 2, x)});

    CaseReport report{name, edges, samples.size(), {}, {}, 0.0};
    for (const auto& s : coalitions) {
      const auto pairs = detail::coalition_pairs(s);
      double best = -std::numeric_limits<double>::infinity();
      ExchangeMatrix best_dev(3);
      for (std::size_t mask = 0; mask < (std::size_t{1} << pairs.size()); ++mask) {
        ExchangeMatrix dev(3);
        for (std::size_t t = 0; t < pairs.size(); ++t)
          if (mask >> t & 1) dev.set(pairs[t].first, pairs[t].second, 1.0);
        std::array<double, 3> after{};
        for (std::size_t i : s.members()) after[i] = utility(inst, i, dev);
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& b : before)
          for (std::size_t i : s.members()) worst = std::min(worst, after[i] - b[i]);
        if (worst > best) {
          best = worst;
          best_dev = dev;
        }
      }
      if (best > 0.0) {
        report.coalition = s;
        report.deviation = best_dev;
        report.min_gain = best;
        break;
      }
    }
    analysis.min_gain = std::min(
        analysis.min_gain,
        report.coalition ? report.min_gain : -std::numeric_limits<double>::infinity());
    analysis.cases.push_back(std::move(report));
  }
  return analysis;
}

}  // namespace dexcore
