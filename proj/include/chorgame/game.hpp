// Copyright 2026 The chorgame Authors
//
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

#ifndef CHORGAME_GAME_HPP
#define CHORGAME_GAME_HPP

/// \file game.hpp
/// \brief The cost-savings game: characteristic function with memoization,
///        pivotal organizations, the candidate stable imputation, and the
///        alliance detection pipeline.
///
/// For a coalition C the price p(C) is the sum of its members' standalone
/// costs, Cost(C) is the optimal pooled schedule cost, and the value
/// (characteristic function) is v(C) = p(C) - Cost(C): the savings achieved
/// by cooperating. Singletons and the empty coalition have value 0.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "chorgame/coalition_cost.hpp"
#include "chorgame/instance.hpp"

namespace chorgame {

/// Memoized economics of one coalition.
struct CoalitionEconomics {
  double cost = 0.0;   ///< Cost(C), optimal pooled schedule
  double price = 0.0;  ///< p(C), sum of members' standalone costs
  double value = 0.0;  ///< v(C) = p(C) - Cost(C)
  std::map<int, double> cost_shares;  ///< cost incurred on each member's machines
};

/// Memoizing front end over coalition_cost. Reads may come from any number of
/// threads; writes are internally synchronized and idempotent (a coalition
/// always maps to the same economics, so losing an insertion race is
/// harmless).
class GameCache {
 public:
  explicit GameCache(const Instance& inst, SolverOptions opts = {})
      : inst_(&inst), opts_(opts) {}

  const Instance& instance() const { return *inst_; }
  const SolverOptions& options() const { return opts_; }
  int organization_count() const { return inst_->size(); }

  const CoalitionEconomics& economics(const Coalition& coalition) {
    const std::uint64_t key = coalition.mask();
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    CoalitionEconomics econ = compute(coalition);
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = memo_.emplace(key, std::move(econ));
    if (inserted && !coalition.empty()) ++oracle_evaluations_;
    return it->second;
  }

  double cost(const Coalition& c) { return economics(c).cost; }
  double value(const Coalition& c) { return economics(c).value; }

  /// p(C) = sum of localcosts, always accumulated in ascending member order.
  double price(const Coalition& c) {
    double p = 0.0;
    for (int k : c.members()) p += localcost(k);
    return p;
  }

  /// Standalone optimum of organization k on its own machines.
  double localcost(int k) { return economics(Coalition({k})).cost; }

  /// Number of distinct non-empty coalitions whose schedule was computed.
  long oracle_evaluations() const { return oracle_evaluations_.load(); }

  /// Whether any cost so far came from the iterative convex oracle.
  bool convex_oracle_used() const { return convex_used_.load(); }

  /// Absolute tolerance for "v equal" comparisons at coalition S: relative
  /// eq_tol scaled by v(S), widened to 10*tol once the convex oracle is in
  /// play so pivotality cannot flip on solver noise.
  double equality_tolerance(const Coalition& s) {
    double tol = opts_.eq_tol * std::max(1.0, std::abs(value(s)));
    if (convex_oracle_used()) tol = std::max(tol, 10.0 * opts_.tol);
    return tol;
  }

 private:
  CoalitionEconomics compute(const Coalition& coalition) {
    CoalitionEconomics econ;
    if (coalition.empty()) return econ;
    if (inst_->objective == Objective::SumEnergy && uses_convex_oracle(coalition))
      convex_used_.store(true);
    ScheduleOutcome outcome = coalition_cost(*inst_, coalition, opts_);
    econ.cost_shares = std::move(outcome.per_org_cost);
    econ.cost = outcome.total_cost;
    if (coalition.size() == 1) {
      econ.price = econ.cost;  // a solo organization pays exactly its localcost
      econ.value = 0.0;
    } else {
      econ.price = price(coalition);
      econ.value = econ.price - econ.cost;
    }
    return econ;
  }

  bool uses_convex_oracle(const Coalition& coalition) const {
    PooledCoalition pooled = pool_coalition(*inst_, coalition);
    if (pooled.jobs.empty() || pooled.machine_owner.size() == 1) return false;
    for (const PooledJob& job : pooled.jobs)
      if (job.volume != 1.0 || job.deadline != pooled.jobs.front().deadline) return true;
    return false;
  }

  const Instance* inst_;
  SolverOptions opts_;
  mutable std::mutex mu_;
  std::unordered_map<std::uint64_t, CoalitionEconomics> memo_;
  std::atomic<long> oracle_evaluations_{0};
  std::atomic<bool> convex_used_{false};
};

/// Organizations whose departure strictly lowers the savings of S:
/// A = {j in S : v(S) > v(S \ {j})}, compared at the cache's equality
/// tolerance. Everyone else is a null player and is paid zero.
inline Coalition pivotal_set(GameCache& game, const Coalition& s) {
  const double vs = game.value(s);
  const double tol = game.equality_tolerance(s);
  std::vector<int> members;
  for (int j : s.members())
    if (vs - game.value(s.without(j)) > tol) members.push_back(j);
  return Coalition(std::move(members));
}

/// Candidate unique stable imputation for coalition S with pivotal set A.
struct StableImputation {
  std::vector<double> x;  ///< full length N; zero outside A
  bool feasible = true;   ///< every pivotal component is >= -eq_tol
  std::vector<int> negative_components;  ///< pivotal organizations with x < 0
};

/// Evaluates, for each pivotal j,
///   x_j = Cost(S\{j}) + p({j}) - (Cost(A) + sum_{k in A} Cost(S\{k})) / |A|
/// and zero for everyone else. The components always sum to p(A) - Cost(A);
/// the vector is an imputation only when every component is nonnegative, so
/// negatives are reported (not clamped) and flip feasible to false.
inline StableImputation stable_imputation(GameCache& game, const Coalition& s,
                                          const Coalition& pivotal) {
  StableImputation result;
  result.x.assign(static_cast<std::size_t>(game.organization_count()), 0.0);
  if (pivotal.empty()) return result;

  const double tol = game.equality_tolerance(s);
  double leave_one_out_sum = 0.0;
  for (int k : pivotal.members()) leave_one_out_sum += game.cost(s.without(k));
  const double mean_share =
      (game.cost(pivotal) + leave_one_out_sum) / static_cast<double>(pivotal.size());
  for (int j : pivotal.members()) {
    const double xj = game.cost(s.without(j)) + game.localcost(j) - mean_share;
    result.x[static_cast<std::size_t>(j)] = xj;
    if (xj < -tol) {
      result.feasible = false;
      result.negative_components.push_back(j);
    }
  }
  return result;
}

inline StableImputation stable_imputation(GameCache& game, const Coalition& s) {
  return stable_imputation(game, s, pivotal_set(game, s));
}

/// Aggregate feasibility gate: the pivotal members' combined standalone price
/// must cover their cooperative cost, p(A) >= Cost(A). Necessary (it is the
/// sum of the per-component nonnegativity conditions) but not sufficient.
inline bool aggregate_price_gate(GameCache& game, const Coalition& s,
                                 const Coalition& pivotal) {
  return game.price(pivotal) >= game.cost(pivotal) - game.equality_tolerance(s);
}

inline bool aggregate_price_gate(GameCache& game, const Coalition& s) {
  return aggregate_price_gate(game, s, pivotal_set(game, s));
}

/// Outcome of the alliance detection pipeline on one coalition.
struct AllianceReport {
  bool feasible = false;
  bool no_savings = false;  ///< v(S) = 0: cooperation saves nothing
  Coalition analyzed;       ///< S
  Coalition pivotal;        ///< A
  double grand_value = 0.0; ///< v(S)
  std::vector<double> imputation;  ///< length N, zero outside A; empty when the
                                   ///< aggregate gate already failed
  double efficiency_gap = 0.0;     ///< v(S) minus the total paid out
  std::map<int, double> cost_shares;  ///< Cost^S_k: cost on k's machines in S's schedule
  std::map<int, bool> incentive;      ///< Cost^S_k - x_k <= localcost_k
  std::string failed_gate;            ///< "", "aggregate" or "nonnegativity"
  std::vector<int> negative_components;
  double equality_tolerance = 0.0;
};

/// Full detection pipeline: standalone costs, leave-one-out costs, the grand
/// cost of S, the pivotal set, the aggregate gate and — if it passes — the
/// imputation with its per-component nonnegativity check. Oracle work is one
/// schedule per distinct coalition in {singletons, leave-one-outs, S, A}.
inline AllianceReport detect_alliance(GameCache& game, const Coalition& s) {
  AllianceReport report;
  report.analyzed = s;

  for (int k : s.members()) game.localcost(k);
  for (int k : s.members()) game.cost(s.without(k));
  const CoalitionEconomics& grand = game.economics(s);
  report.grand_value = grand.value;
  report.cost_shares = grand.cost_shares;
  report.equality_tolerance = game.equality_tolerance(s);
  report.no_savings = grand.value <= report.equality_tolerance;
  report.pivotal = pivotal_set(game, s);

  if (!aggregate_price_gate(game, s, report.pivotal)) {
    report.failed_gate = "aggregate";
    report.efficiency_gap = grand.value;
    return report;
  }

  StableImputation imputation = stable_imputation(game, s, report.pivotal);
  report.imputation = imputation.x;
  report.negative_components = imputation.negative_components;
  report.feasible = imputation.feasible;
  if (!imputation.feasible) report.failed_gate = "nonnegativity";

  double paid = 0.0;
  for (int j : report.pivotal.members()) paid += imputation.x[static_cast<std::size_t>(j)];
  report.efficiency_gap = grand.value - paid;
  for (int k : s.members()) {
    const double share = report.cost_shares.at(k);
    report.incentive[k] =
        share - imputation.x[static_cast<std::size_t>(k)] <=
        game.localcost(k) + report.equality_tolerance;
  }
  return report;
}

}  // namespace chorgame

#endif  // CHORGAME_GAME_HPP
