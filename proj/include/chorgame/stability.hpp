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

#ifndef CHORGAME_STABILITY_HPP
#define CHORGAME_STABILITY_HPP

/// \file stability.hpp
/// \brief Objections, counter-objections and bargaining-set membership
///        checks for a payoff vector.
///
/// An objection of i against j is a coalition P (with i, without j) and a
/// payoff y over P that improves i strictly without hurting the others,
/// funded by v(P). A counter-objection is a coalition Q (with j, without i)
/// whose value can honor y for the shared members and the original x for the
/// rest. A payoff vector is stable when every objection admits a counter.
///
/// The continuum of payoffs forces an epsilon-approximate decision procedure:
/// strict inequalities are realized as >= x + epsilon, and an objection is
/// "justified at epsilon" when it blocks every counter with margin epsilon.
/// The search is monotone: an objection found at epsilon survives at any
/// smaller epsilon.
///
/// Everything here is generic over the characteristic function, so tests can
/// drive the machinery with hand-built value tables as well as with the
/// scheduling game.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chorgame/detail/linear_feasibility.hpp"
#include "chorgame/game.hpp"
#include "chorgame/instance.hpp"

namespace chorgame {

struct Objection {
  int objector = -1;  ///< i, strictly better off under the objection
  int target = -1;    ///< j, excluded from the objecting coalition
  Coalition coalition;         ///< P: contains objector, excludes target
  std::vector<double> payoff;  ///< y, full length; meaningful on P
};

struct CounterObjection {
  Coalition coalition;         ///< Q: contains target, excludes objector
  std::vector<double> payoff;  ///< z, full length; meaningful on Q
};

/// Surplus v(C) - x(C): what C could gain on top of its current payoffs.
/// Coalitions without positive excess cannot fund any objection.
template <class ValueFn>
double excess(ValueFn&& value, const Coalition& coalition, const std::vector<double>& x) {
  double e = coalition.empty() ? 0.0 : value(coalition);
  for (int k : coalition.members()) e -= x[static_cast<std::size_t>(k)];
  return e;
}

namespace detail {

/// Ascending enumeration of the subsets of `base` (given as a bitmask).
inline std::vector<std::uint64_t> ascending_submasks(std::uint64_t base) {
  std::vector<std::uint64_t> out;
  std::uint64_t sub = base;
  while (true) {
    out.push_back(sub);
    if (sub == 0) break;
    sub = (sub - 1) & base;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Replayable check of the objection invariants against (x, v).
template <class ValueFn>
bool objection_is_valid(ValueFn&& value, const Coalition& s, const std::vector<double>& x,
                        const Objection& obj, double tol = 1e-9) {
  if (obj.objector == obj.target) return false;
  if (!s.contains(obj.objector) || !s.contains(obj.target)) return false;
  if (!obj.coalition.contains(obj.objector) || obj.coalition.contains(obj.target))
    return false;
  if ((obj.coalition.mask() & ~s.mask()) != 0) return false;
  double total = 0.0;
  for (int k : obj.coalition.members()) {
    const double yk = obj.payoff[static_cast<std::size_t>(k)];
    if (yk < x[static_cast<std::size_t>(k)] - tol) return false;
    total += yk;
  }
  const double vp = value(obj.coalition);
  if (total > vp + tol * std::max(1.0, std::abs(vp))) return false;
  return obj.payoff[static_cast<std::size_t>(obj.objector)] >
         x[static_cast<std::size_t>(obj.objector)];
}

/// Exact counter-objection check by full enumeration of the 2^(|S|-2)
/// candidate coalitions Q with the target and without the objector. Q counters
/// when v(Q) covers the objection payoffs of the shared members plus the
/// original payoffs of the others; the witness gives each member its bound and
/// the target the slack. Returns the first countering Q in ascending mask
/// order, or nothing if no Q qualifies.
template <class ValueFn>
std::optional<CounterObjection> counter_exists(ValueFn&& value, const Coalition& s,
                                               const std::vector<double>& x,
                                               const Objection& obj) {
  if (s.size() > 20)
    throw std::invalid_argument("counter-objection enumeration limited to 20 organizations");
  const std::uint64_t pmask = obj.coalition.mask();
  const std::uint64_t jbit = std::uint64_t{1} << obj.target;
  const std::uint64_t base = s.mask() & ~(std::uint64_t{1} << obj.objector);

  for (std::uint64_t q : detail::ascending_submasks(base)) {
    if (q == 0 || (q & jbit) == 0) continue;
    const Coalition counter = Coalition::from_mask(q);
    double need = 0.0;
    for (int k : counter.members())
      need += (pmask >> k) & 1u ? obj.payoff[static_cast<std::size_t>(k)]
                                : x[static_cast<std::size_t>(k)];
    const double vq = value(counter);
    if (vq >= need) {
      CounterObjection result;
      result.coalition = counter;
      result.payoff.assign(x.size(), 0.0);
      for (int k : counter.members())
        result.payoff[static_cast<std::size_t>(k)] =
            (pmask >> k) & 1u ? obj.payoff[static_cast<std::size_t>(k)]
                              : x[static_cast<std::size_t>(k)];
      result.payoff[static_cast<std::size_t>(obj.target)] += vq - need;
      return result;
    }
  }
  return std::nullopt;
}

/// Searches for an objection at x that no coalition can counter, with strict
/// inequalities separated by epsilon.
///
/// For each ordered pair (i, j) and each P containing i but not j whose
/// excess exceeds epsilon, the candidate payoffs y over P form a polytope:
///   y >= x on P,  y_i >= x_i + epsilon,  y(P) = v(P),
///   and for every Q with j and without i:  y(Q cap P) >= v(Q) - x(Q \ P) + epsilon.
/// Substituting u = y - x reduces this to a minimum-mass covering problem
/// over P \ {i} with budget excess(P) - epsilon, solved by exhaustive vertex
/// enumeration for up to four organizations and by a simplex routine beyond.
/// Returns the first witness in (i, j, P) order, or nothing.
template <class ValueFn>
std::optional<Objection> justified_objection_search(ValueFn&& value, const Coalition& s,
                                                    const std::vector<double>& x,
                                                    double epsilon) {
  if (s.size() > 12)
    throw std::invalid_argument("justified objection search limited to 12 organizations");
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  const bool exhaustive_vertices = s.size() <= 4;

  for (int i : s.members()) {
    for (int j : s.members()) {
      if (i == j) continue;
      const std::uint64_t ibit = std::uint64_t{1} << i;
      const std::uint64_t pbase = s.mask() & ~(std::uint64_t{1} << j);
      const std::uint64_t qbase = s.mask() & ~ibit;
      const std::uint64_t jbit = std::uint64_t{1} << j;

      for (std::uint64_t pmask : detail::ascending_submasks(pbase)) {
        if ((pmask & ibit) == 0) continue;
        const Coalition p = Coalition::from_mask(pmask);
        const double budget = excess(value, p, x) - epsilon;
        if (budget <= 0) continue;

        // Covering variables: u_k = y_k - x_k for k in P \ {i}.
        std::vector<int> vars;
        for (int k : p.members())
          if (k != i) vars.push_back(k);
        std::vector<int> var_of(x.size(), -1);
        for (std::size_t r = 0; r < vars.size(); ++r)
          var_of[static_cast<std::size_t>(vars[r])] = static_cast<int>(r);

        bool blocked = false;
        std::vector<chorgame::detail::CoverRow> rows;
        for (std::uint64_t qmask : detail::ascending_submasks(qbase)) {
          if (qmask == 0 || (qmask & jbit) == 0) continue;
          const Coalition q = Coalition::from_mask(qmask);
          const double gap = excess(value, q, x) + epsilon;
          if (gap <= 0) continue;
          std::uint32_t tmask = 0;
          for (int k : q.members())
            if (var_of[static_cast<std::size_t>(k)] >= 0)
              tmask |= std::uint32_t{1} << var_of[static_cast<std::size_t>(k)];
          if (tmask == 0) {  // Q shares nothing with P: it always counters
            blocked = true;
            break;
          }
          rows.push_back({tmask, gap});
        }
        if (blocked) continue;

        const chorgame::detail::CoverSolution sol = chorgame::detail::min_mass_cover(
            static_cast<int>(vars.size()), rows, exhaustive_vertices);
        if (sol.total > budget + 1e-12 * std::max(1.0, budget)) continue;

        Objection witness;
        witness.objector = i;
        witness.target = j;
        witness.coalition = p;
        witness.payoff.assign(x.size(), 0.0);
        for (std::size_t r = 0; r < vars.size(); ++r)
          witness.payoff[static_cast<std::size_t>(vars[r])] =
              x[static_cast<std::size_t>(vars[r])] + sol.u[r];
        witness.payoff[static_cast<std::size_t>(i)] =
            x[static_cast<std::size_t>(i)] + std::max(budget - sol.total, 0.0) + epsilon;
        return witness;
      }
    }
  }
  return std::nullopt;
}

/// Sufficient condition for the target j to counter any objection raised by i
/// inside S at payoff x:
///   x_j - x_i <= p({j}) - p({i}) - Cost(S\{i}) + Cost(S\{j}).
/// Holds with equality in both directions at the candidate stable imputation.
inline bool pairwise_counter_condition(GameCache& game, const Coalition& s,
                                       const std::vector<double>& x, int i, int j) {
  const double lhs = x[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(i)];
  const double rhs = game.localcost(j) - game.localcost(i) - game.cost(s.without(i)) +
                     game.cost(s.without(j));
  return lhs <= rhs + game.equality_tolerance(s);
}

/// Aggregated stability diagnostics for a payoff vector.
struct StabilityReport {
  bool null_payment_ok = true;   ///< non-pivotal members are paid zero
  bool nonnegativity_ok = true;  ///< payoffs are nonnegative on S
  /// counter_condition_matrix[i][j]: pairwise counter condition for objector i
  /// against target j; vacuously true outside pivotal pairs.
  std::vector<std::vector<bool>> counter_condition_matrix;
  std::optional<Objection> justified_objection;
  Coalition pivotal;
  double epsilon = 0.0;
  std::string feasibility_method;  ///< "vertex-enumeration" or "simplex"

  bool all_checks_pass() const {
    if (!null_payment_ok || !nonnegativity_ok || justified_objection) return false;
    for (const auto& row : counter_condition_matrix)
      for (bool ok : row)
        if (!ok) return false;
    return true;
  }
};

/// Runs every stability check on a user-supplied payoff vector: zero payment
/// to null players, nonnegativity, the pairwise counter condition over
/// pivotal pairs, and the justified objection search. Condition violations
/// and search outcomes are reported separately — the pairwise condition is
/// only sufficient for counterability, so a false entry is a flag, not a
/// proof of instability.
inline StabilityReport stability_report(GameCache& game, const Coalition& s,
                                        const std::vector<double>& x, double epsilon) {
  if (static_cast<int>(x.size()) != game.organization_count())
    throw std::invalid_argument("payoff vector length must equal the organization count");
  StabilityReport report;
  report.epsilon = epsilon;
  report.feasibility_method = s.size() <= 4 ? "vertex-enumeration" : "simplex";
  report.pivotal = pivotal_set(game, s);
  const double tol = game.equality_tolerance(s);

  for (int j : s.members()) {
    if (!report.pivotal.contains(j) && std::abs(x[static_cast<std::size_t>(j)]) > tol)
      report.null_payment_ok = false;
    if (x[static_cast<std::size_t>(j)] < -tol) report.nonnegativity_ok = false;
  }

  const int n = game.organization_count();
  report.counter_condition_matrix.assign(static_cast<std::size_t>(n),
                                         std::vector<bool>(static_cast<std::size_t>(n), true));
  for (int i : report.pivotal.members())
    for (int j : report.pivotal.members())
      if (i != j)
        report.counter_condition_matrix[static_cast<std::size_t>(i)]
                                       [static_cast<std::size_t>(j)] =
            pairwise_counter_condition(game, s, x, i, j);

  auto value = [&game](const Coalition& c) { return game.value(c); };
  report.justified_objection = justified_objection_search(value, s, x, epsilon);
  return report;
}

}  // namespace chorgame

#endif  // CHORGAME_STABILITY_HPP
