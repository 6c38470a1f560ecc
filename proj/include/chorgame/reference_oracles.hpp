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

#ifndef CHORGAME_REFERENCE_ORACLES_HPP
#define CHORGAME_REFERENCE_ORACLES_HPP

/// \file reference_oracles.hpp
/// \brief Brute-force reference oracles for desk-scale instances.
///
/// These exist to check the production schedulers and deliberately share no
/// code with them: exhaustive enumeration for the completion objective and a
/// lattice search over per-interval work splits for the energy objective.
/// Both refuse inputs beyond their size caps.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace chorgame {

/// Exhaustive minimum of the total completion time over every assignment of
/// jobs to machines (each machine then runs its jobs shortest-first).
/// Refuses n > 8 or m > 3.
inline double brute_force_sum_completion(const std::vector<double>& proc_times, int m) {
  const std::size_t n = proc_times.size();
  if (m < 1) throw std::invalid_argument("machine count must be >= 1");
  if (n > 8 || m > 3)
    throw std::invalid_argument("brute-force completion oracle limited to n <= 8, m <= 3");
  if (n == 0) return 0.0;

  std::vector<int> assign(n, 0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> buckets(static_cast<std::size_t>(m));
  while (true) {
    for (auto& b : buckets) b.clear();
    for (std::size_t i = 0; i < n; ++i)
      buckets[static_cast<std::size_t>(assign[i])].push_back(proc_times[i]);
    double total = 0.0;
    for (auto& b : buckets) {
      std::sort(b.begin(), b.end());
      double clock = 0.0;
      for (double p : b) {
        clock += p;
        total += clock;
      }
    }
    best = std::min(best, total);
    std::size_t pos = 0;
    while (pos < n && assign[pos] == m - 1) assign[pos++] = 0;
    if (pos == n) break;
    ++assign[pos];
  }
  return best;
}

namespace reference_detail {

/// Optimal energy for fixed works inside one window of the given length on m
/// machines: repeatedly peel off any job too big to share (it gets a machine
/// to itself at speed w / length), then run the rest at one common speed.
inline double window_energy(std::vector<double> works, double length, int m, double alpha) {
  std::sort(works.begin(), works.end(), std::greater<double>());
  while (!works.empty() && works.back() <= 0.0) works.pop_back();
  double total = 0.0;
  for (double w : works) total += w;
  double energy = 0.0;
  std::size_t solo = 0;
  int machines = m;
  while (solo < works.size() && machines > 0 &&
         static_cast<double>(machines) * works[solo] > total) {
    const double speed = works[solo] / length;
    energy += std::pow(speed, alpha) * length;
    total -= works[solo];
    --machines;
    ++solo;
  }
  if (solo < works.size()) {
    const double speed = total / (static_cast<double>(machines) * length);
    energy += total * std::pow(speed, alpha - 1.0);
  }
  return energy;
}

}  // namespace reference_detail

/// Minimum energy over a lattice of per-interval work allocations: each job
/// splits its volume across the deadline intervals it may use in multiples of
/// `step` times its volume. Upper-bounds the true optimum and converges to it
/// as step -> 0. Jobs are (volume, deadline) pairs; release dates are 0.
/// Refuses lattices beyond ~4e6 points.
inline double grid_energy_oracle(const std::vector<std::pair<double, double>>& jobs, int m,
                                 double alpha, double step) {
  if (m < 1) throw std::invalid_argument("machine count must be >= 1");
  if (!(step > 0)) throw std::invalid_argument("grid step must be positive");
  if (jobs.empty()) return 0.0;

  std::vector<double> bounds;
  for (const auto& [volume, deadline] : jobs) bounds.push_back(deadline);
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
  const std::size_t intervals = bounds.size();
  std::vector<double> lengths(intervals);
  for (std::size_t t = 0; t < intervals; ++t)
    lengths[t] = bounds[t] - (t == 0 ? 0.0 : bounds[t - 1]);

  std::vector<int> units;        // lattice units per job
  std::vector<int> last;         // last usable interval per job
  double lattice_points = 1.0;
  for (const auto& [volume, deadline] : jobs) {
    units.push_back(std::max(1, static_cast<int>(std::llround(1.0 / step))));
    const auto it = std::lower_bound(bounds.begin(), bounds.end(), deadline);
    last.push_back(static_cast<int>(it - bounds.begin()));
    // compositions of `units` into (last + 1) parts
    double combos = 1.0;
    for (int k = 1; k <= last.back(); ++k)
      combos = combos * (units.back() + k) / k;
    lattice_points *= combos;
  }
  if (lattice_points > 4e6)
    throw std::invalid_argument("grid energy oracle refused: lattice too large");

  const std::size_t n = jobs.size();
  std::vector<std::vector<double>> works(intervals, std::vector<double>(n, 0.0));
  double best = std::numeric_limits<double>::infinity();

  // Depth-first product of per-job compositions.
  std::vector<std::vector<int>> split(n);
  auto evaluate = [&]() {
    double energy = 0.0;
    for (std::size_t t = 0; t < intervals; ++t)
      energy += reference_detail::window_energy(works[t], lengths[t], m, alpha);
    best = std::min(best, energy);
  };
  auto rec = [&](auto&& self, std::size_t job) -> void {
    if (job == n) {
      evaluate();
      return;
    }
    const int parts = last[job] + 1;
    const double unit = jobs[job].first / units[static_cast<std::size_t>(job)];
    std::vector<int> comp(static_cast<std::size_t>(parts), 0);
    auto assign = [&](auto&& go, int part, int remaining) -> void {
      if (part == parts - 1) {
        comp[static_cast<std::size_t>(part)] = remaining;
        for (int t = 0; t < parts; ++t)
          works[static_cast<std::size_t>(t)][job] =
              unit * comp[static_cast<std::size_t>(t)];
        self(self, job + 1);
        return;
      }
      for (int take = 0; take <= remaining; ++take) {
        comp[static_cast<std::size_t>(part)] = take;
        go(go, part + 1, remaining - take);
      }
    };
    assign(assign, 0, units[static_cast<std::size_t>(job)]);
  };
  rec(rec, 0);
  return best;
}

}  // namespace chorgame

#endif  // CHORGAME_REFERENCE_ORACLES_HPP
