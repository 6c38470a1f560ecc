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

#ifndef CHORGAME_SUM_COMPLETION_HPP
#define CHORGAME_SUM_COMPLETION_HPP

/// \file sum_completion.hpp
/// \brief Exact minimum total completion time on identical machines.

#include <algorithm>
#include <numeric>
#include <tuple>
#include <vector>

#include "chorgame/schedule.hpp"

namespace chorgame {

/// Minimum sum of completion times for non-preemptive jobs on m identical
/// machines: shortest processing time first, machines assigned round-robin.
/// Equal processing times are ordered by (org, index) so placement — and with
/// it the per-organization cost split — is reproducible.
///
/// machine_owner maps pooled machine index to owning organization; when empty
/// every machine is attributed to organization 0. Completion time of a job is
/// charged to the owner of the machine it runs on.
inline ScheduleOutcome schedule_sum_completion(const std::vector<PooledJob>& jobs, int m,
                                               std::vector<int> machine_owner = {}) {
  if (m < 1) throw std::invalid_argument("machine count must be >= 1");
  if (machine_owner.empty()) machine_owner.assign(static_cast<std::size_t>(m), 0);
  if (static_cast<int>(machine_owner.size()) != m)
    throw std::invalid_argument("machine_owner size must match machine count");

  std::vector<int> order(jobs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&jobs](int a, int b) {
    const PooledJob& ja = jobs[static_cast<std::size_t>(a)];
    const PooledJob& jb = jobs[static_cast<std::size_t>(b)];
    return std::tie(ja.proc_time, ja.org, ja.index) <
           std::tie(jb.proc_time, jb.org, jb.index);
  });

  ScheduleOutcome out;
  for (int owner : machine_owner) out.per_org_cost[owner] = 0.0;

  std::vector<double> machine_clock(static_cast<std::size_t>(m), 0.0);
  std::vector<double> machine_sum(static_cast<std::size_t>(m), 0.0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const int job = order[i];
    const int q = static_cast<int>(i % static_cast<std::size_t>(m));
    const double start = machine_clock[static_cast<std::size_t>(q)];
    const double end = start + jobs[static_cast<std::size_t>(job)].proc_time;
    machine_clock[static_cast<std::size_t>(q)] = end;
    machine_sum[static_cast<std::size_t>(q)] += end;
    out.placement.push_back({job, q, start, end, 1.0});
  }
  for (int q = 0; q < m; ++q)
    out.per_org_cost[machine_owner[static_cast<std::size_t>(q)]] +=
        machine_sum[static_cast<std::size_t>(q)];
  for (const auto& [org, cost] : out.per_org_cost) out.total_cost += cost;
  return out;
}

}  // namespace chorgame

#endif  // CHORGAME_SUM_COMPLETION_HPP
