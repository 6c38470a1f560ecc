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

#ifndef CHORGAME_ENERGY_HPP
#define CHORGAME_ENERGY_HPP

/// \file energy.hpp
/// \brief Energy-optimal speed-scaling schedulers (power s^alpha, alpha > 1,
///        all release dates 0, preemption and migration allowed).
///
/// Three oracles, from most to least specialized:
///   - schedule_energy_common_deadline: closed form for unit jobs sharing one
///     deadline on m machines.
///   - schedule_energy_single_machine_yds: exact critical-interval peeling on
///     a single machine, arbitrary deadlines and volumes.
///   - schedule_energy_general: convex program over per-interval work and
///     occupancy, solved by projected gradient descent. Matches the two
///     specialized oracles on their domains to within the solver tolerance.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>
#include <vector>

#include "chorgame/schedule.hpp"

namespace chorgame {

namespace detail {

/// Time allocation of one deadline interval for fixed per-job works:
/// minimizes sum_j w_j^alpha / tau_j^(alpha-1) subject to 0 <= tau_j <= length
/// and sum_j tau_j <= m * length. The optimum has a common level c with
/// tau_j = min(c * w_j, length), so jobs are either capped at the full window
/// or run at the shared speed 1/c.
struct IntervalAllocation {
  std::vector<double> tau;      ///< same indexing as the works vector
  double marginal_speed = 0.0;  ///< speed an infinitesimal new job would get
  bool capacity_binding = false;
};

inline IntervalAllocation allocate_interval_time(const std::vector<double>& works,
                                                 double length, int m) {
  IntervalAllocation alloc;
  alloc.tau.assign(works.size(), 0.0);

  std::vector<int> active;
  for (std::size_t j = 0; j < works.size(); ++j)
    if (works[j] > 0.0) active.push_back(static_cast<int>(j));

  if (static_cast<int>(active.size()) <= m) {
    double min_work = std::numeric_limits<double>::infinity();
    for (int j : active) {
      alloc.tau[static_cast<std::size_t>(j)] = length;
      min_work = std::min(min_work, works[static_cast<std::size_t>(j)]);
    }
    if (static_cast<int>(active.size()) == m) {
      // Every machine is fully busy: marginal work would share the window
      // with (and run at the speed of) the smallest current job.
      alloc.capacity_binding = true;
      alloc.marginal_speed = min_work / length;
    }
    return alloc;  // otherwise spare machine time makes marginal work free
  }

  // Water level: largest works hit the per-job cap first. Suffix sums keep
  // the remaining-work terms positive even when works span many magnitudes.
  std::sort(active.begin(), active.end(),
            [&works](int a, int b) { return works[a] > works[b]; });
  std::vector<double> suffix(active.size() + 1, 0.0);
  for (std::size_t r = active.size(); r-- > 0;)
    suffix[r] = suffix[r + 1] + works[static_cast<std::size_t>(active[r])];

  double level = 0.0;
  std::size_t capped = 0;
  for (; capped < active.size(); ++capped) {
    const double c =
        (static_cast<double>(m) - static_cast<double>(capped)) * length / suffix[capped];
    const double w = works[static_cast<std::size_t>(active[capped])];
    if (c * w <= length * (1.0 + 1e-12)) {
      level = c;
      break;
    }
  }
  for (std::size_t r = 0; r < active.size(); ++r) {
    const std::size_t j = static_cast<std::size_t>(active[r]);
    alloc.tau[j] = r < capped ? length : level * works[j];
  }
  alloc.capacity_binding = true;
  alloc.marginal_speed = 1.0 / level;
  return alloc;
}

/// Euclidean projection onto the scaled simplex {v >= 0, sum v = target}.
inline void project_to_simplex(std::vector<double>& v, double target) {
  std::vector<double> u(v);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumulative = 0.0;
  double theta = 0.0;
  double best_theta = (std::accumulate(v.begin(), v.end(), 0.0) - target) /
                      static_cast<double>(v.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    cumulative += u[i];
    theta = (cumulative - target) / static_cast<double>(i + 1);
    if (u[i] - theta > 0) best_theta = theta;
  }
  for (double& x : v) x = std::max(x - best_theta, 0.0);
}

/// Flattened per-(job, interval) work variables with the deadline structure.
struct EnergyProgram {
  int n = 0;
  int m = 1;
  int intervals = 0;
  double alpha = 2.0;
  std::vector<double> bound;   ///< interval right endpoints (distinct deadlines)
  std::vector<double> length;  ///< interval lengths
  std::vector<int> last_interval;  ///< per job, last interval it may use
  std::vector<double> volume;

  std::size_t at(int job, int t) const {
    return static_cast<std::size_t>(job) * static_cast<std::size_t>(intervals) +
           static_cast<std::size_t>(t);
  }
};

inline EnergyProgram build_energy_program(const std::vector<PooledJob>& jobs, int m,
                                          double alpha) {
  EnergyProgram prog;
  prog.n = static_cast<int>(jobs.size());
  prog.m = m;
  prog.alpha = alpha;
  std::vector<double> deadlines;
  for (const PooledJob& j : jobs) deadlines.push_back(j.deadline);
  std::sort(deadlines.begin(), deadlines.end());
  deadlines.erase(std::unique(deadlines.begin(), deadlines.end()), deadlines.end());
  prog.bound = deadlines;
  prog.intervals = static_cast<int>(deadlines.size());
  prog.length.resize(deadlines.size());
  for (std::size_t t = 0; t < deadlines.size(); ++t)
    prog.length[t] = deadlines[t] - (t == 0 ? 0.0 : deadlines[t - 1]);
  for (const PooledJob& j : jobs) {
    const auto it = std::lower_bound(deadlines.begin(), deadlines.end(), j.deadline);
    prog.last_interval.push_back(static_cast<int>(it - deadlines.begin()));
    prog.volume.push_back(j.volume);
  }
  return prog;
}

/// Objective and per-interval allocations for a work matrix.
struct EnergyEvaluation {
  double objective = 0.0;
  std::vector<IntervalAllocation> alloc;  ///< one per interval
};

inline EnergyEvaluation evaluate_energy(const EnergyProgram& prog,
                                        const std::vector<double>& w) {
  EnergyEvaluation ev;
  ev.alloc.reserve(static_cast<std::size_t>(prog.intervals));
  std::vector<double> works(static_cast<std::size_t>(prog.n));
  for (int t = 0; t < prog.intervals; ++t) {
    for (int j = 0; j < prog.n; ++j)
      works[static_cast<std::size_t>(j)] = t <= prog.last_interval[static_cast<std::size_t>(j)]
                                               ? w[prog.at(j, t)]
                                               : 0.0;
    IntervalAllocation alloc =
        allocate_interval_time(works, prog.length[static_cast<std::size_t>(t)], prog.m);
    for (int j = 0; j < prog.n; ++j) {
      const double wjt = works[static_cast<std::size_t>(j)];
      if (wjt > 0.0) {
        const double speed = wjt / alloc.tau[static_cast<std::size_t>(j)];
        ev.objective += wjt * std::pow(speed, prog.alpha - 1.0);
      }
    }
    ev.alloc.push_back(std::move(alloc));
  }
  return ev;
}

inline std::vector<double> energy_gradient(const EnergyProgram& prog,
                                           const std::vector<double>& w,
                                           const EnergyEvaluation& ev) {
  std::vector<double> grad(w.size(), 0.0);
  for (int t = 0; t < prog.intervals; ++t) {
    const IntervalAllocation& alloc = ev.alloc[static_cast<std::size_t>(t)];
    const double len = prog.length[static_cast<std::size_t>(t)];
    for (int j = 0; j < prog.n; ++j) {
      if (t > prog.last_interval[static_cast<std::size_t>(j)]) continue;
      const double wjt = w[prog.at(j, t)];
      double speed;
      if (wjt > 0.0)
        speed = std::max(wjt / len, wjt / alloc.tau[static_cast<std::size_t>(j)]);
      else
        speed = alloc.capacity_binding ? alloc.marginal_speed : 0.0;
      grad[prog.at(j, t)] = prog.alpha * std::pow(speed, prog.alpha - 1.0);
    }
  }
  return grad;
}

inline void project_energy_works(const EnergyProgram& prog, std::vector<double>& w) {
  std::vector<double> slice;
  for (int j = 0; j < prog.n; ++j) {
    const int allowed = prog.last_interval[static_cast<std::size_t>(j)] + 1;
    slice.assign(static_cast<std::size_t>(allowed), 0.0);
    for (int t = 0; t < allowed; ++t) slice[static_cast<std::size_t>(t)] = w[prog.at(j, t)];
    project_to_simplex(slice, prog.volume[static_cast<std::size_t>(j)]);
    for (int t = 0; t < prog.intervals; ++t)
      w[prog.at(j, t)] = t < allowed ? slice[static_cast<std::size_t>(t)] : 0.0;
  }
}

}  // namespace detail

/// Migratory optimum for n unit jobs sharing one deadline on m machines.
/// With n >= m every machine carries load n/m at constant speed n/(m*D);
/// with n < m every job runs alone at speed 1/D. The no_migration variant
/// balances integral loads instead (ceil/floor of n/m per machine).
inline ScheduleOutcome schedule_energy_common_deadline(int n, int m, double deadline,
                                                       double alpha,
                                                       std::vector<int> machine_owner = {},
                                                       bool no_migration = false) {
  if (m < 1) throw std::invalid_argument("machine count must be >= 1");
  if (!(deadline > 0)) throw std::invalid_argument("deadline must be positive");
  if (machine_owner.empty()) machine_owner.assign(static_cast<std::size_t>(m), 0);
  if (static_cast<int>(machine_owner.size()) != m)
    throw std::invalid_argument("machine_owner size must match machine count");

  ScheduleOutcome out;
  for (int owner : machine_owner) out.per_org_cost[owner] = 0.0;
  if (n == 0) return out;

  std::vector<double> per_machine(static_cast<std::size_t>(m), 0.0);
  if (no_migration) {
    int job = 0;
    for (int q = 0; q < m; ++q) {
      const int load = n / m + (q < n % m ? 1 : 0);
      if (load == 0) continue;
      const double speed = static_cast<double>(load) / deadline;
      const double slot = deadline / static_cast<double>(load);
      for (int i = 0; i < load; ++i, ++job)
        out.placement.push_back({job, q, i * slot, (i + 1) * slot, speed});
      per_machine[static_cast<std::size_t>(q)] = std::pow(speed, alpha) * deadline;
    }
  } else if (n >= m) {
    const double speed = static_cast<double>(n) / (static_cast<double>(m) * deadline);
    const double tau = static_cast<double>(m) * deadline / static_cast<double>(n);
    std::vector<OccupancySlice> slices;
    slices.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) slices.push_back({j, tau, speed});
    mcnaughton_fill(out.placement, slices, 0.0, deadline, m);
    for (int q = 0; q < m; ++q)
      per_machine[static_cast<std::size_t>(q)] = std::pow(speed, alpha) * deadline;
  } else {
    const double speed = 1.0 / deadline;
    for (int j = 0; j < n; ++j) {
      out.placement.push_back({j, j, 0.0, deadline, speed});
      per_machine[static_cast<std::size_t>(j)] = std::pow(speed, alpha) * deadline;
    }
  }
  for (int q = 0; q < m; ++q)
    out.per_org_cost[machine_owner[static_cast<std::size_t>(q)]] +=
        per_machine[static_cast<std::size_t>(q)];
  for (const auto& [org, cost] : out.per_org_cost) out.total_cost += cost;
  return out;
}

/// Exact single-machine optimum by critical-interval peeling, specialized to
/// release dates 0: repeatedly take the deadline prefix of maximum density
/// (cumulative volume over elapsed window), run it at that density, remove it
/// and recurse on the remainder. Jobs execute in deadline order within each
/// level. Ties in density take the longer prefix, which yields the canonical
/// minimal number of speed levels.
inline ScheduleOutcome schedule_energy_single_machine_yds(std::vector<PooledJob> jobs,
                                                          double alpha,
                                                          std::vector<int> machine_owner = {}) {
  if (machine_owner.empty()) machine_owner.assign(1, 0);
  if (machine_owner.size() != 1)
    throw std::invalid_argument("single-machine oracle expects one machine owner");

  ScheduleOutcome out;
  out.per_org_cost[machine_owner[0]] = 0.0;
  if (jobs.empty()) return out;

  std::vector<int> order(jobs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&jobs](int a, int b) {
    const PooledJob& ja = jobs[static_cast<std::size_t>(a)];
    const PooledJob& jb = jobs[static_cast<std::size_t>(b)];
    return std::tie(ja.deadline, ja.org, ja.index) <
           std::tie(jb.deadline, jb.org, jb.index);
  });

  double window_start = 0.0;
  double energy = 0.0;
  std::size_t first = 0;
  while (first < order.size()) {
    double cumulative = 0.0;
    double best_density = -1.0;
    std::size_t best_last = first;
    for (std::size_t k = first; k < order.size(); ++k) {
      cumulative += jobs[static_cast<std::size_t>(order[k])].volume;
      const double density =
          cumulative / (jobs[static_cast<std::size_t>(order[k])].deadline - window_start);
      if (density >= best_density) {  // >= keeps the longer prefix on ties
        best_density = density;
        best_last = k;
      }
    }
    const double window_end = jobs[static_cast<std::size_t>(order[best_last])].deadline;
    double cursor = window_start;
    for (std::size_t k = first; k <= best_last; ++k) {
      const int job = order[k];
      const double span = jobs[static_cast<std::size_t>(job)].volume / best_density;
      out.placement.push_back({job, 0, cursor, cursor + span, best_density});
      cursor += span;
    }
    energy += std::pow(best_density, alpha) * (window_end - window_start);
    window_start = window_end;
    first = best_last + 1;
  }
  out.per_org_cost[machine_owner[0]] = energy;
  out.total_cost = energy;
  return out;
}

/// Migratory optimum (to relative accuracy opts.tol) for arbitrary deadlines,
/// volumes and machine counts.
///
/// The time axis is partitioned at the distinct deadlines. Per interval t of
/// length L_t each job j owns a work variable w_{j,t} >= 0 (zero past its
/// deadline) with sum_t w_{j,t} = volume_j, and the interval's machine time
/// splits optimally as tau_{j,t} = min(c_t w_{j,t}, L_t) under
/// sum_j tau_{j,t} <= m L_t. The resulting reduced objective
/// sum w^alpha / tau^(alpha-1) is convex in w and is minimized by projected
/// gradient descent with a backtracking line search; per-interval placement is
/// wrap-around, feasible exactly because tau <= L_t and sum tau <= m L_t.
///
/// Throws SolverError (carrying the best objective found) if the iteration
/// cap is hit before the relative objective change drops below opts.tol.
inline ScheduleOutcome schedule_energy_general(const std::vector<PooledJob>& jobs, int m,
                                               double alpha, const SolverOptions& opts = {},
                                               std::vector<int> machine_owner = {}) {
  if (m < 1) throw std::invalid_argument("machine count must be >= 1");
  if (machine_owner.empty()) machine_owner.assign(static_cast<std::size_t>(m), 0);
  if (static_cast<int>(machine_owner.size()) != m)
    throw std::invalid_argument("machine_owner size must match machine count");
  if (!(opts.tol > 0)) throw std::invalid_argument("tol must be positive");

  ScheduleOutcome out;
  for (int owner : machine_owner) out.per_org_cost[owner] = 0.0;
  if (jobs.empty()) return out;

  const detail::EnergyProgram prog = detail::build_energy_program(jobs, m, alpha);

  // Start uniform over each job's allowed intervals.
  std::vector<double> w(static_cast<std::size_t>(prog.n) *
                            static_cast<std::size_t>(prog.intervals),
                        0.0);
  for (int j = 0; j < prog.n; ++j) {
    const int allowed = prog.last_interval[static_cast<std::size_t>(j)] + 1;
    for (int t = 0; t < allowed; ++t)
      w[prog.at(j, t)] = prog.volume[static_cast<std::size_t>(j)] / allowed;
  }

  detail::EnergyEvaluation ev = detail::evaluate_energy(prog, w);
  double step = 1.0;
  bool converged = prog.intervals == 1;  // single interval: w is fully determined
  int calm = 0;
  for (int iter = 0; !converged && iter < opts.max_iterations; ++iter) {
    const std::vector<double> grad = detail::energy_gradient(prog, w, ev);
    std::vector<double> trial(w.size());
    detail::EnergyEvaluation trial_ev;
    bool accepted = false;
    int backtracks = 0;
    while (backtracks < 80) {
      for (std::size_t i = 0; i < w.size(); ++i) trial[i] = w[i] - step * grad[i];
      detail::project_energy_works(prog, trial);
      trial_ev = detail::evaluate_energy(prog, trial);
      double decrease = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) decrease += grad[i] * (w[i] - trial[i]);
      if (trial_ev.objective <= ev.objective - 0.25 * decrease + 1e-18) {
        accepted = true;
        break;
      }
      step *= 0.5;
      ++backtracks;
    }
    if (!accepted) {  // stationary at machine precision: objective change is zero
      converged = true;
      break;
    }
    const double rel = std::abs(ev.objective - trial_ev.objective) /
                       std::max(1.0, std::abs(trial_ev.objective));
    w = std::move(trial);
    ev = std::move(trial_ev);
    if (rel < opts.tol) {
      if (++calm >= 3) converged = true;
    } else {
      calm = 0;
    }
    if (backtracks == 0) step *= 1.5;
  }
  if (!converged)
    throw SolverError("energy solver did not converge within the iteration cap",
                      ev.objective);

  // Realize the schedule interval by interval.
  double t0 = 0.0;
  for (int t = 0; t < prog.intervals; ++t) {
    const detail::IntervalAllocation& alloc = ev.alloc[static_cast<std::size_t>(t)];
    std::vector<OccupancySlice> slices;
    for (int j = 0; j < prog.n; ++j) {
      if (t > prog.last_interval[static_cast<std::size_t>(j)]) continue;
      const double wjt = w[prog.at(j, t)];
      if (wjt <= 0.0) continue;
      const double tau = alloc.tau[static_cast<std::size_t>(j)];
      slices.push_back({j, tau, wjt / tau});
    }
    mcnaughton_fill(out.placement, slices, t0, prog.length[static_cast<std::size_t>(t)], m);
    t0 = prog.bound[static_cast<std::size_t>(t)];
  }
  std::vector<double> per_machine(static_cast<std::size_t>(m), 0.0);
  for (const PlacementPiece& piece : out.placement)
    per_machine[static_cast<std::size_t>(piece.machine)] +=
        std::pow(piece.speed, alpha) * (piece.end - piece.start);
  for (int q = 0; q < m; ++q)
    out.per_org_cost[machine_owner[static_cast<std::size_t>(q)]] +=
        per_machine[static_cast<std::size_t>(q)];
  for (const auto& [org, cost] : out.per_org_cost) out.total_cost += cost;
  return out;
}

}  // namespace chorgame

#endif  // CHORGAME_ENERGY_HPP
