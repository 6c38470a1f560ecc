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

#ifndef CHORGAME_SCHEDULE_HPP
#define CHORGAME_SCHEDULE_HPP

/// \file schedule.hpp
/// \brief Schedule outcome types shared by every scheduling oracle, plus the
///        wrap-around placement used to realize preemptive schedules.

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace chorgame {

/// A job pooled into one coalition schedule.
struct PooledJob {
  double volume = 1.0;
  double deadline = 0.0;   ///< energy objective only
  double proc_time = 0.0;  ///< completion objective only
  int org = 0;             ///< owning organization (instance index)
  int index = 0;           ///< position within the owner's job list
};

/// One contiguous run of a job on one machine. A preempted or migrated job
/// appears as several pieces; no two pieces of the same job overlap in time.
struct PlacementPiece {
  int job = 0;      ///< index into the pooled job list
  int machine = 0;  ///< pooled machine index
  double start = 0.0;
  double end = 0.0;
  double speed = 1.0;  ///< processor speed (energy objective; 1 otherwise)
};

/// Result of scheduling a coalition's pooled jobs on its pooled machines.
///
/// total_cost always equals the sum of the per-organization shares: energy
/// burned (or completion time accrued) on an organization's machines belongs
/// to that organization.
struct ScheduleOutcome {
  double total_cost = 0.0;
  std::map<int, double> per_org_cost;  ///< keyed by organization index
  std::vector<PlacementPiece> placement;
};

/// Knobs shared by the iterative energy solver and the game engine.
struct SolverOptions {
  double tol = 1e-9;          ///< relative tolerance of the iterative energy solver
  double eq_tol = 1e-9;       ///< relative equality tolerance for value comparisons
  bool no_migration = false;  ///< integral balanced loads in the common-deadline case
  int max_iterations = 100000;
};

/// Iterative solver failed to reach the requested tolerance; carries the best
/// objective bound found.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double best_bound)
      : std::runtime_error(what), best_bound_(best_bound) {}
  double best_bound() const { return best_bound_; }

 private:
  double best_bound_;
};

/// Per-job occupancy inside one scheduling window.
struct OccupancySlice {
  int job = 0;
  double time = 0.0;   ///< total machine time the job occupies in the window
  double speed = 1.0;
};

/// McNaughton wrap-around: packs per-job occupancy times into the window
/// [t0, t0 + window] on machines [first_machine, first_machine + m).
/// Requires time <= window per slice and sum(time) <= m * window; under these
/// bounds a job split at a machine boundary never runs on two machines at
/// the same instant.
inline void mcnaughton_fill(std::vector<PlacementPiece>& placement,
                            const std::vector<OccupancySlice>& slices, double t0,
                            double window, int m, int first_machine = 0) {
  const double eps = 1e-12 * std::max(1.0, window);
  int machine = 0;
  double offset = 0.0;
  for (const OccupancySlice& s : slices) {
    double remaining = s.time;
    while (remaining > eps) {
      if (machine >= m) {
        // float drift past the last machine boundary; drop the residue
        if (remaining <= 16 * eps) break;
        throw std::logic_error("wrap-around placement overflow");
      }
      const double take = std::min(remaining, window - offset);
      placement.push_back({s.job, first_machine + machine, t0 + offset,
                           t0 + offset + take, s.speed});
      offset += take;
      remaining -= take;
      if (offset >= window - eps) {
        ++machine;
        offset = 0.0;
      }
    }
  }
}

}  // namespace chorgame

#endif  // CHORGAME_SCHEDULE_HPP
