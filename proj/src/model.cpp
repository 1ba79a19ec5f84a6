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

#include "dexcore/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dexcore/errors.hpp"

namespace dexcore {

namespace {

void check_index(std::size_t i, std::size_t n, const char* what) {
  if (i >= n) {
    std::ostringstream msg;
    msg << what << " index " << i << " out of range for " << n << " agents";
    throw InvalidArgument(msg.str());
  }
}

void check_compatible(const Instance& inst, std::size_t i,
                      const ExchangeMatrix& x) {
  check_index(i, inst.size(), "agent");
  if (x.size() != inst.size()) {
    throw InvalidArgument("exchange is " + std::to_string(x.size()) +
                          "x" + std::to_string(x.size()) + " but instance has " +
                          std::to_string(inst.size()) + " agents");
  }
}

}  // namespace

ExchangeMatrix::ExchangeMatrix(std::size_t n) : n_(n), entries_(n * n, 0.0) {}

ExchangeMatrix ExchangeMatrix::filled(std::size_t n, double value) {
  ExchangeMatrix x(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) x.set(i, j, value);
  return x;
}

ExchangeMatrix ExchangeMatrix::from_rows(
    const std::vector<std::vector<double>>& rows) {
  ExchangeMatrix x(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size())
      throw InvalidArgument("exchange row " + std::to_string(i) +
                            " has wrong length");
    for (std::size_t j = 0; j < rows.size(); ++j) x.set(i, j, rows[i][j]);
  }
  return x;
}

double ExchangeMatrix::at(std::size_t i, std::size_t j) const {
  check_index(i, n_, "row");
  check_index(j, n_, "column");
  return (*this)(i, j);
}

void ExchangeMatrix::set(std::size_t i, std::size_t j, double value) {
  check_index(i, n_, "row");
  check_index(j, n_, "column");
  if (!(value >= 0.0 && value <= 1.0)) {
    std::ostringstream msg;
    msg << "share (" << i << "," << j << ") = " << value << " outside [0,1]";
    throw InvalidArgument(msg.str());
  }
  if (i == j && value != 0.0)
    throw InvalidArgument("diagonal share must be zero");
  entries_[i * n_ + j] = value;
}

std::vector<double> ExchangeMatrix::column(std::size_t j) const {
  std::vector<double> c(n_);
  for (std::size_t i = 0; i < n_; ++i) c[i] = (*this)(i, j);
  return c;
}

double all_ones_payoff(const std::vector<AgentUtility>& agents) {
  const std::size_t n = agents.size();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> incoming(n, 1.0);
    incoming[i] = 0.0;
    best = std::max(best, agents[i].payoff(incoming));
  }
  return best;
}

Instance::Instance(std::vector<AgentUtility> agents, double payoff_bound,
                   std::string label, nlohmann::json document)
    : agents_(std::move(agents)),
      payoff_bound_(payoff_bound),
      label_(std::move(label)),
      document_(std::move(document)) {
  if (agents_.empty()) throw InvalidArgument("instance has no agents");
  const std::vector<double> zeros(agents_.size(), 0.0);
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const auto& a = agents_[i];
    if (!a.payoff || !a.cost)
      throw InvalidArgument("agent " + std::to_string(i) +
                            " lacks payoff or cost");
    if (a.payoff(zeros) != 0.0 || a.cost(zeros) != 0.0)
      throw InvalidArgument("agent " + std::to_string(i) +
                            " has nonzero payoff or cost at the empty exchange");
  }
  if (payoff_bound_ < all_ones_payoff(agents_))
    throw InvalidArgument("payoff bound below the all-ones payoff");
}

std::string Instance::family() const {
  return document_.value("family", std::string{});
}

bool Instance::certified() const {
  return std::all_of(agents_.begin(), agents_.end(), [](const AgentUtility& a) {
    return a.concave_convex_certified;
  });
}

Coalition::Coalition(std::initializer_list<std::size_t> members)
    : Coalition(std::vector<std::size_t>(members)) {}

Coalition::Coalition(std::vector<std::size_t> members)
    : members_(std::move(members)) {
  if (members_.empty()) throw InvalidArgument("coalition must be nonempty");
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
    throw InvalidArgument("coalition has duplicate members");
}

Coalition Coalition::all(std::size_t n) {
  std::vector<std::size_t> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = i;
  return Coalition(std::move(m));
}

bool Coalition::contains(std::size_t agent) const {
  return std::binary_search(members_.begin(), members_.end(), agent);
}

std::size_t Coalition::position(std::size_t agent) const {
  auto it = std::lower_bound(members_.begin(), members_.end(), agent);
  if (it == members_.end() || *it != agent)
    throw InvalidArgument("agent " + std::to_string(agent) +
                          " is not in coalition " + to_string());
  return static_cast<std::size_t>(it - members_.begin());
}

std::string Coalition::to_string() const {
  std::ostringstream out;
  out << '{';
  for (std::size_t k = 0; k < members_.size(); ++k)
    out << (k ? "," : "") << members_[k];
  out << '}';
  return out.str();
}

std::vector<Coalition> coalitions_up_to(std::size_t n, std::size_t min_size,
                                        std::size_t max_size) {
  std::vector<Coalition> out;
  max_size = std::min(max_size, n);
  for (std::size_t k = std::max<std::size_t>(min_size, 1); k <= max_size; ++k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t t = 0; t < k; ++t) idx[t] = t;
    while (true) {
      out.emplace_back(idx);
      std::size_t t = k;
      while (t > 0 && idx[t - 1] == n - k + (t - 1)) --t;
      if (t == 0) break;
      ++idx[t - 1];
      for (std::size_t r = t; r < k; ++r) idx[r] = idx[r - 1] + 1;
    }
  }
  return out;
}

double payoff(const Instance& inst, std::size_t i, const ExchangeMatrix& x) {
  check_compatible(inst, i, x);
  return inst.agent(i).payoff(x.column(i));
}

double cost(const Instance& inst, std::size_t i, const ExchangeMatrix& x) {
  check_compatible(inst, i, x);
  return inst.agent(i).cost(x.row(i));
}

double utility(const Instance& inst, std::size_t i, const ExchangeMatrix& x) {
  check_compatible(inst, i, x);
  const auto& a = inst.agent(i);
  return a.payoff(x.column(i)) - a.cost(x.row(i));
}

Eigen::MatrixXd utility_supergradient(const Instance& inst, std::size_t i,
                                      const ExchangeMatrix& x) {
  check_compatible(inst, i, x);
  const auto& a = inst.agent(i);
  if (!a.concave_convex_certified || !a.payoff_supergradient ||
      !a.cost_subgradient)
    throw Unsupported("agent " + std::to_string(i) +
                      " is not concave/convex certified; no supergradient");
  const std::size_t n = x.size();
  std::vector<double> gp(n, 0.0), gc(n, 0.0);
  a.payoff_supergradient(x.column(i), gp);
  a.cost_subgradient(x.row(i), gc);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    g(j, i) = gp[j];
    g(i, j) = -gc[j];
  }
  return g;
}

ExchangeMatrix restrict(const ExchangeMatrix& x, const Coalition& s) {
  ExchangeMatrix out(x.size());
  for (std::size_t a : s.members()) {
    if (a >= x.size())
      throw InvalidArgument("coalition member " + std::to_string(a) +
                            " out of range");
    for (std::size_t b : s.members())
      if (a != b) out.set(a, b, x(a, b));
  }
  return out;
}

QueryCounters& QueryCounters::operator+=(const QueryCounters& other) {
  value_queries += other.value_queries;
  supergradient_queries += other.supergradient_queries;
  optimization_calls += other.optimization_calls;
  return *this;
}

double Oracle::value_query(std::size_t i, const ExchangeMatrix& x) {
  check_compatible(*inst_, i, x);
  ++counters_.value_queries;
  const auto& a = inst_->agent(i);
  const std::size_t n = x.size();
  scratch_in_.resize(n);
  for (std::size_t j = 0; j < n; ++j) scratch_in_[j] = x(j, i);
  return a.payoff(scratch_in_) - a.cost(x.row(i));
}

Eigen::MatrixXd Oracle::supergradient_query(std::size_t i,
                                            const ExchangeMatrix& x) {
  auto g = utility_supergradient(*inst_, i, x);
  ++counters_.supergradient_queries;
  return g;
}

void Oracle::accumulate_supergradient(
    std::size_t i, const ExchangeMatrix& x,
    std::span<const std::pair<std::size_t, std::size_t>> pairs, double weight,
    std::span<double> out) {
  check_compatible(*inst_, i, x);
  const auto& a = inst_->agent(i);
  if (!a.concave_convex_certified)
    throw Unsupported("agent " + std::to_string(i) +
                      " is not concave/convex certified; no supergradient");
  ++counters_.supergradient_queries;
  const std::size_t n = x.size();
  scratch_in_.resize(n);
  for (std::size_t j = 0; j < n; ++j) scratch_in_[j] = x(j, i);
  scratch_grad_.assign(2 * n, 0.0);
  std::span<double> gp(scratch_grad_.data(), n);
  std::span<double> gc(scratch_grad_.data() + n, n);
  a.payoff_supergradient(scratch_in_, gp);
  a.cost_subgradient(x.row(i), gc);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [from, to] = pairs[k];
    if (to == i && from != i) out[k] += weight * gp[from];
    if (from == i && to != i) out[k] -= weight * gc[to];
  }
}

}  // namespace dexcore
