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

#ifndef DEXCORE_MODEL_HPP
#define DEXCORE_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace dexcore {

/// Dense n x n matrix of share fractions. Entry (i, j) is the fraction of
/// agent i's data shared with agent j. Entries live in [0,1] and the
/// diagonal is identically zero.
class ExchangeMatrix {
 public:
  ExchangeMatrix() = default;
  explicit ExchangeMatrix(std::size_t n);

  /// Every off-diagonal entry set to `value`.
  static ExchangeMatrix filled(std::size_t n, double value);
  static ExchangeMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return n_; }

  double operator()(std::size_t i, std::size_t j) const {
    return entries_[i * n_ + j];
  }
  double at(std::size_t i, std::size_t j) const;

  /// Throws InvalidArgument for an out-of-range index, a value outside
  /// [0,1], or a nonzero diagonal value.
  void set(std::size_t i, std::size_t j, double value);

  std::span<const double> row(std::size_t i) const {
    return {entries_.data() + i * n_, n_};
  }
  std::vector<double> column(std::size_t j) const;
  std::span<const double> data() const { return entries_; }

  bool operator==(const ExchangeMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> entries_;
};

using ShareFunction = std::function<double(std::span<const double>)>;
/// Writes a first-order certificate of a ShareFunction into `out`
/// (same length as the input vector).
using ShareGradient =
    std::function<void(std::span<const double>, std::span<double>)>;

/// Payoff over the incoming share vector (column i of the exchange) and
/// cost over the outgoing share vector (row i). Both vectors have length n;
/// entry i is always zero.
struct AgentUtility {
  ShareFunction payoff;
  ShareFunction cost;
  ShareGradient payoff_supergradient;
  ShareGradient cost_subgradient;
  bool concave_convex_certified = false;
};

/// A family-generated instance. `document` holds the family name and the
/// realized parameters; the instance file format is built from it.
class Instance {
 public:
  Instance(std::vector<AgentUtility> agents, double payoff_bound,
           std::string label, nlohmann::json document);

  std::size_t size() const { return agents_.size(); }
  const AgentUtility& agent(std::size_t i) const { return agents_.at(i); }
  double payoff_bound() const { return payoff_bound_; }
  const std::string& label() const { return label_; }
  const nlohmann::json& document() const { return document_; }
  std::string family() const;

  /// True when every agent has a concave payoff and a convex cost.
  bool certified() const;

 private:
  std::vector<AgentUtility> agents_;
  double payoff_bound_;
  std::string label_;
  nlohmann::json document_;
};

/// Largest payoff any agent receives when everyone shares everything.
double all_ones_payoff(const std::vector<AgentUtility>& agents);

/// Nonempty sorted set of agent indices.
class Coalition {
 public:
  Coalition(std::initializer_list<std::size_t> members);
  explicit Coalition(std::vector<std::size_t> members);
  static Coalition all(std::size_t n);

  std::span<const std::size_t> members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  std::size_t operator[](std::size_t k) const { return members_[k]; }
  bool contains(std::size_t agent) const;
  /// Position of `agent` inside members(); throws if absent.
  std::size_t position(std::size_t agent) const;
  std::string to_string() const;

  auto operator<=>(const Coalition&) const = default;

 private:
  std::vector<std::size_t> members_;
};

/// All coalitions of size in [min_size, max_size] over n agents, ordered by
/// size and then lexicographically.
std::vector<Coalition> coalitions_up_to(std::size_t n, std::size_t min_size,
                                        std::size_t max_size);

/// u_i(x) = p_i(column i) - c_i(row i).
double utility(const Instance& inst, std::size_t i, const ExchangeMatrix& x);
double payoff(const Instance& inst, std::size_t i, const ExchangeMatrix& x);
double cost(const Instance& inst, std::size_t i, const ExchangeMatrix& x);

/// Supergradient of u_i at x as an n x n matrix: column i carries the payoff
/// supergradient, row i carries minus the cost subgradient. Throws
/// Unsupported when agent i is not concave/convex certified.
Eigen::MatrixXd utility_supergradient(const Instance& inst, std::size_t i,
                                      const ExchangeMatrix& x);

/// Zero every entry with an endpoint outside the coalition.
ExchangeMatrix restrict(const ExchangeMatrix& x, const Coalition& s);

struct QueryCounters {
  std::uint64_t value_queries = 0;
  std::uint64_t supergradient_queries = 0;
  /// Concave-maximization solves issued by the attainability oracle.
  std::uint64_t optimization_calls = 0;

  QueryCounters& operator+=(const QueryCounters& other);
};

/// Counted access to an instance under the value / supergradient oracle
/// model. Not thread-safe; give each worker its own and merge counters.
class Oracle {
 public:
  explicit Oracle(const Instance& inst) : inst_(&inst) {}

  const Instance& instance() const { return *inst_; }

  double value_query(std::size_t i, const ExchangeMatrix& x);
  Eigen::MatrixXd supergradient_query(std::size_t i, const ExchangeMatrix& x);

  /// Adds u_i's supergradient restricted to the ordered pairs in `pairs`
  /// into `out` (scaled by `weight`). Counted as one supergradient query.
  void accumulate_supergradient(
      std::size_t i, const ExchangeMatrix& x,
      std::span<const std::pair<std::size_t, std::size_t>> pairs,
      double weight, std::span<double> out);

  void record_optimization_call() { ++counters_.optimization_calls; }
  const QueryCounters& counters() const { return counters_; }
  void reset() { counters_ = {}; }

 private:
  const Instance* inst_;
  QueryCounters counters_;
  std::vector<double> scratch_in_;
  std::vector<double> scratch_grad_;
};

}  // namespace dexcore

#endif  // DEXCORE_MODEL_HPP
