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

#ifndef CHORGAME_COALITION_COST_HPP
#define CHORGAME_COALITION_COST_HPP

/// \file coalition_cost.hpp
/// \brief Optimal cost of a coalition: pools the members' jobs and machines
///        and dispatches to the cheapest applicable exact oracle.

#include <vector>

#include "chorgame/energy.hpp"
#include "chorgame/instance.hpp"
#include "chorgame/schedule.hpp"
#include "chorgame/sum_completion.hpp"

namespace chorgame {

/// Jobs and machines of a coalition, in ascending member order. Machine q is
/// owned by organization machine_owner[q]; a coalition of {k1 < k2 < ...}
/// lists k1's machines first.
struct PooledCoalition {
  std::vector<PooledJob> jobs;
  std::vector<int> machine_owner;
};

inline PooledCoalition pool_coalition(const Instance& inst, const Coalition& coalition) {
  PooledCoalition pooled;
  for (int k : coalition.members()) {
    if (k < 0 || k >= inst.size())
      throw std::invalid_argument("coalition member out of range: " + std::to_string(k));
    const Organization& org = inst.organizations[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < org.jobs.size(); ++i) {
      const Job& job = org.jobs[i];
      pooled.jobs.push_back({job.volume, job.deadline.value_or(0.0),
                             job.proc_time.value_or(0.0), k, static_cast<int>(i)});
    }
    pooled.machine_owner.insert(pooled.machine_owner.end(),
                                static_cast<std::size_t>(org.machine_count), k);
  }
  return pooled;
}

/// Optimal cost of scheduling all of the coalition's jobs on all of its
/// machines. The empty coalition costs 0. Dispatch order: shortest-processing-
/// time for the completion objective; otherwise the common-deadline closed
/// form when every job is a unit job with one shared deadline, the single-
/// machine peeling oracle when the coalition owns one machine, and the convex
/// program for everything else.
inline ScheduleOutcome coalition_cost(const Instance& inst, const Coalition& coalition,
                                      const SolverOptions& opts = {}) {
  ScheduleOutcome zero;
  if (coalition.empty()) return zero;

  PooledCoalition pooled = pool_coalition(inst, coalition);
  const int m = static_cast<int>(pooled.machine_owner.size());

  if (inst.objective == Objective::SumCompletion)
    return schedule_sum_completion(pooled.jobs, m, pooled.machine_owner);

  const double alpha = inst.alpha.value();
  if (pooled.jobs.empty()) {
    for (int k : coalition.members()) zero.per_org_cost[k] = 0.0;
    return zero;
  }

  bool common_unit = true;
  for (const PooledJob& job : pooled.jobs)
    if (job.volume != 1.0 || job.deadline != pooled.jobs.front().deadline) {
      common_unit = false;
      break;
    }
  if (common_unit)
    return schedule_energy_common_deadline(static_cast<int>(pooled.jobs.size()), m,
                                           pooled.jobs.front().deadline, alpha,
                                           pooled.machine_owner, opts.no_migration);
  if (m == 1)
    return schedule_energy_single_machine_yds(pooled.jobs, alpha, pooled.machine_owner);
  return schedule_energy_general(pooled.jobs, m, alpha, opts, pooled.machine_owner);
}

}  // namespace chorgame

#endif  // CHORGAME_COALITION_COST_HPP
