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

#include "chorgame/stability.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>

#include "chorgame/detail/linear_feasibility.hpp"
#include "test_support.hpp"

using namespace chorgame;
using namespace chorgame::testing;

namespace {

/// Characteristic function backed by an explicit mask-indexed table; entries
/// missing from the table are zero.
struct TableGame {
  std::map<std::uint64_t, double> table;
  double operator()(const Coalition& c) const {
    const auto it = table.find(c.mask());
    return it == table.end() ? 0.0 : it->second;
  }
};

/// Test-side re-enumeration of the counter-objection condition, kept separate
/// from the implementation on purpose.
bool counter_should_exist(const TableGame& v, const Coalition& s,
                          const std::vector<double>& x, const Objection& obj) {
  const std::uint64_t base = s.mask() & ~(std::uint64_t{1} << obj.objector);
  for (std::uint64_t q = 1; q <= base; ++q) {
    if ((q & base) != q) continue;
    if (((q >> obj.target) & 1u) == 0) continue;
    double need = 0.0;
    for (int k = 0; k < 12; ++k)
      if ((q >> k) & 1u)
        need += (obj.coalition.mask() >> k) & 1u ? obj.payoff[static_cast<std::size_t>(k)]
                                                 : x[static_cast<std::size_t>(k)];
    if (v(Coalition::from_mask(q)) >= need) return true;
  }
  return false;
}

/// Objections restricted to the complement coalition of the target; this is
/// the family the pairwise counter condition provably protects against.
template <class ValueFn>
bool complement_objection_exists(ValueFn&& value, const Coalition& s,
                                 const std::vector<double>& x, double eps) {
  for (int i : s.members())
    for (int j : s.members()) {
      if (i == j) continue;
      const Coalition p = s.without(j);
      const double budget = excess(value, p, x) - eps;
      if (budget <= 0) continue;
      std::vector<int> vars;
      for (int k : p.members())
        if (k != i) vars.push_back(k);
      std::vector<int> var_of(x.size(), -1);
      for (std::size_t r = 0; r < vars.size(); ++r)
        var_of[static_cast<std::size_t>(vars[r])] = static_cast<int>(r);
      bool blocked = false;
      std::vector<chorgame::detail::CoverRow> rows;
      const std::uint64_t qbase = s.mask() & ~(std::uint64_t{1} << i);
      for (std::uint64_t q = 1; q <= qbase; ++q) {
        if ((q & qbase) != q || ((q >> j) & 1u) == 0) continue;
        const Coalition qc = Coalition::from_mask(q);
        const double gap = excess(value, qc, x) + eps;
        if (gap <= 0) continue;
        std::uint32_t t = 0;
        for (int k : qc.members())
          if (var_of[static_cast<std::size_t>(k)] >= 0)
            t |= std::uint32_t{1} << var_of[static_cast<std::size_t>(k)];
        if (t == 0) {
          blocked = true;
          break;
        }
        rows.push_back({t, gap});
      }
      if (blocked) continue;
      const auto sol =
          chorgame::detail::min_mass_cover(static_cast<int>(vars.size()), rows, true);
      if (sol.total <= budget + 1e-12 * std::max(1.0, budget)) return true;
    }
  return false;
}

}  // namespace

TEST_CASE("excess is the surplus over current payoffs") {
  const Instance inst = example_instance(2.0);
  GameCache game(inst);
  auto value = [&game](const Coalition& c) { return game.value(c); };
  const std::vector<double> x = {168, 0, 24, 24};
  CHECK(excess(value, Coalition({1, 3}), x) == Catch::Approx(-6.0).epsilon(1e-12));
  CHECK(excess(value, Coalition(), x) == 0.0);
  CHECK(excess(value, Coalition({1}), x) == 0.0);  // v({k}) = 0, x_k = 0
}

TEST_CASE("pairwise counter condition on the two-member alliance") {
  const Instance inst = example_instance(2.0);
  GameCache game(inst);
  const Coalition s({1, 3});
  std::vector<double> x = {0, 9, 0, 9};
  // holds with equality in both directions at the stable point
  CHECK(pairwise_counter_condition(game, s, x, 1, 3));
  CHECK(pairwise_counter_condition(game, s, x, 3, 1));
  // transferring one unit breaks exactly one direction
  std::vector<double> skew = {0, 8, 0, 10};
  CHECK_FALSE(pairwise_counter_condition(game, s, skew, 1, 3));
  CHECK(pairwise_counter_condition(game, s, skew, 3, 1));
}

TEST_CASE("counter search finds the rebutting coalition in a hand-built game") {
  TableGame v;
  v.table[0b111] = 6.0;
  v.table[0b101] = 5.0;  // {0, 2}: the objecting coalition
  v.table[0b110] = 5.0;  // {1, 2}: the rebuttal
  const Coalition s = Coalition::all(3);
  const std::vector<double> x = {2, 2, 2};
  Objection obj;
  obj.objector = 0;
  obj.target = 1;
  obj.coalition = Coalition({0, 2});
  obj.payoff = {2.5, 0, 2.5};
  REQUIRE(objection_is_valid(v, s, x, obj));
  const auto counter = counter_exists(v, s, x, obj);
  REQUIRE(counter.has_value());
  CHECK(counter->coalition == Coalition({1, 2}));
  // members of Q keep their bounds; the target collects the slack
  CHECK(counter->payoff[2] == 2.5);
  CHECK(counter->payoff[1] == Catch::Approx(2.5));

  // weaker rebuttal value: no counter anywhere
  v.table[0b110] = 4.0;
  CHECK_FALSE(counter_exists(v, s, x, obj).has_value());
}

TEST_CASE("counter search refuses oversized games") {
  TableGame v;
  const Coalition s = Coalition::all(21);
  const std::vector<double> x(21, 0.0);
  Objection obj;
  obj.objector = 0;
  obj.target = 1;
  obj.coalition = Coalition({0});
  obj.payoff = x;
  CHECK_THROWS_AS(counter_exists(v, s, x, obj), std::invalid_argument);
}

TEST_CASE("counter search agrees with independent enumeration on random tables") {
  std::mt19937 rng(2468);
  std::uniform_real_distribution<double> val(0.0, 8.0);
  std::uniform_int_distribution<int> Nd(3, 5);
  for (int round = 0; round < 200; ++round) {
    const int n = Nd(rng);
    const Coalition s = Coalition::all(n);
    TableGame v;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask)
      if (Coalition::from_mask(mask).size() >= 2) v.table[mask] = val(rng);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (double& xi : x) xi = val(rng) / n;
    Objection obj;
    obj.objector = round % n;
    obj.target = (round + 1) % n;
    std::vector<int> members = {obj.objector};
    for (int k = 0; k < n; ++k)
      if (k != obj.objector && k != obj.target && (rng() & 1u)) members.push_back(k);
    obj.coalition = Coalition(members);
    obj.payoff.assign(static_cast<std::size_t>(n), 0.0);
    for (int k : obj.coalition.members())
      obj.payoff[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(k)] + val(rng) / 4;
    const bool expected = counter_should_exist(v, s, x, obj);
    const auto got = counter_exists(v, s, x, obj);
    CHECK(got.has_value() == expected);
    if (got) {
      // replay the counter-objection invariants
      double total = 0.0;
      for (int k : got->coalition.members()) {
        const double zk = got->payoff[static_cast<std::size_t>(k)];
        total += zk;
        if (obj.coalition.contains(k))
          CHECK(zk >= obj.payoff[static_cast<std::size_t>(k)] - 1e-12);
        else
          CHECK(zk >= x[static_cast<std::size_t>(k)] - 1e-12);
      }
      CHECK(total <= v(got->coalition) + 1e-9);
      CHECK(got->coalition.contains(obj.target));
      CHECK_FALSE(got->coalition.contains(obj.objector));
    }
  }
}

TEST_CASE("no justified objection at the stable points of the worked example") {
  const Instance inst = example_instance(2.0);
  GameCache game(inst);
  auto value = [&game](const Coalition& c) { return game.value(c); };
  CHECK_FALSE(justified_objection_search(value, Coalition({1, 3}), {0, 9, 0, 9}, 1e-3)
                  .has_value());
  CHECK_FALSE(
      justified_objection_search(value, Coalition::all(4), {168, 0, 24, 24}, 1e-2)
          .has_value());
  // even a lopsided split of the pair's savings yields nothing: the only
  // coalition available to an objector is its own singleton, which has no
  // surplus to fund an improvement
  CHECK_FALSE(justified_objection_search(value, Coalition({1, 3}), {0, 8, 0, 10}, 1e-3)
                  .has_value());
}

TEST_CASE("paying a null player provokes a justified objection") {
  // x moves five units from O1 to the null player O2; the objection mirrors
  // the departure of the coalition without O2.
  const Instance inst = example_instance(2.0);
  GameCache game(inst);
  auto value = [&game](const Coalition& c) { return game.value(c); };
  const Coalition s = Coalition::all(4);
  const std::vector<double> bad = {163, 5, 24, 24};
  const auto obj = justified_objection_search(value, s, bad, 1e-2);
  REQUIRE(obj.has_value());
  CHECK(obj->target == 1);
  CHECK(obj->coalition == Coalition({0, 2, 3}));
  CHECK(objection_is_valid(value, s, bad, *obj));
  CHECK_FALSE(counter_exists(value, s, bad, *obj).has_value());
}

TEST_CASE("returned objections always replay cleanly") {
  std::mt19937 rng(1357);
  std::uniform_real_distribution<double> val(0.0, 10.0);
  std::uniform_int_distribution<int> Nd(3, 4);
  int found = 0;
  for (int round = 0; round < 300; ++round) {
    const int n = Nd(rng);
    const Coalition s = Coalition::all(n);
    TableGame v;
    // monotone random game: add a nonnegative increment per extra member
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      if (Coalition::from_mask(mask).size() < 2) continue;
      double best_sub = 0.0;
      for (int k = 0; k < n; ++k)
        if ((mask >> k) & 1u) {
          const auto it = v.table.find(mask & ~(std::uint64_t{1} << k));
          if (it != v.table.end()) best_sub = std::max(best_sub, it->second);
        }
      v.table[mask] = best_sub + val(rng) / 2;
    }
    std::vector<double> x(static_cast<std::size_t>(n));
    for (double& xi : x) xi = val(rng) / (2 * n);
    const auto obj = justified_objection_search(v, s, x, 1e-2);
    if (!obj) continue;
    ++found;
    CHECK(objection_is_valid(v, s, x, *obj));
    CHECK_FALSE(counter_exists(v, s, x, *obj).has_value());
    // monotone in the separation margin: also found at smaller epsilon
    CHECK(justified_objection_search(v, s, x, 1e-2 / 4).has_value());
    CHECK(justified_objection_search(v, s, x, 1e-2 / 16).has_value());
  }
  CHECK(found > 50);  // the generator must actually exercise the machinery
}

TEST_CASE("coalitions without surplus cannot fund an objection") {
  // With excess(P) <= 0 the most generous payoff still violates either the
  // budget or the strict-improvement requirement.
  std::mt19937 rng(9753);
  std::uniform_real_distribution<double> val(0.0, 6.0);
  for (int round = 0; round < 100; ++round) {
    TableGame v;
    const int n = 3;
    const Coalition s = Coalition::all(n);
    for (std::uint64_t mask = 1; mask < 8; ++mask)
      if (Coalition::from_mask(mask).size() >= 2) v.table[mask] = val(rng);
    std::vector<double> x = {val(rng), val(rng), val(rng)};
    for (std::uint64_t pmask = 1; pmask < 8; ++pmask) {
      const Coalition p = Coalition::from_mask(pmask);
      if (excess(v, p, x) > 0) continue;
      for (int i : p.members()) {
        // best candidate: everyone else at their floor, objector takes the rest
        Objection obj;
        obj.objector = i;
        obj.target = -1;
        for (int j = 0; j < n; ++j)
          if (!p.contains(j)) obj.target = j;
        if (obj.target < 0) continue;
        obj.coalition = p;
        obj.payoff.assign(static_cast<std::size_t>(n), 0.0);
        double rest = v(p);
        for (int k : p.members())
          if (k != i) {
            obj.payoff[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(k)];
            rest -= x[static_cast<std::size_t>(k)];
          }
        obj.payoff[static_cast<std::size_t>(i)] = rest;
        CHECK_FALSE(objection_is_valid(v, s, x, obj));
      }
    }
  }
}

TEST_CASE("vertex enumeration and simplex agree on random covering systems") {
  std::mt19937 rng(8642);
  std::uniform_real_distribution<double> val(0.1, 5.0);
  std::uniform_int_distribution<int> vars(1, 3), nrows(1, 6);
  for (int round = 0; round < 300; ++round) {
    const int n = vars(rng);
    std::vector<chorgame::detail::CoverRow> rows;
    const int r = nrows(rng);
    for (int i = 0; i < r; ++i) {
      const std::uint32_t mask = static_cast<std::uint32_t>(rng() % (1u << n));
      if (mask == 0) continue;
      rows.push_back({mask, val(rng)});
    }
    const auto a = chorgame::detail::min_mass_cover_vertex(n, rows);
    const auto b = chorgame::detail::min_mass_cover_simplex(n, rows);
    CHECK(a.total == Catch::Approx(b.total).margin(1e-7));
    // both witnesses satisfy every constraint
    for (const auto& solution : {a, b})
      for (const auto& row : rows) {
        double covered = 0.0;
        for (int k = 0; k < n; ++k)
          if ((row.mask >> k) & 1u) covered += solution.u[static_cast<std::size_t>(k)];
        CHECK(covered >= row.bound - 1e-7);
      }
  }
}

TEST_CASE("detected alliances resist complement-coalition objections") {
  // This is the family of threats the pairwise counter condition provably
  // rebuts; random feasible games must never produce one at the computed
  // imputation.
  std::mt19937 rng(11111);
  std::uniform_int_distribution<int> nd(0, 10), md(1, 4), Nd(2, 4), ai(0, 1);
  const double alphas[] = {2.0, 3.0};
  int feasible = 0, tried = 0;
  while (feasible < 100 && tried < 4000) {
    ++tried;
    const int n = Nd(rng);
    std::vector<std::pair<int, int>> spec;
    for (int k = 0; k < n; ++k) spec.push_back({nd(rng), md(rng)});
    const Instance inst = common_deadline_instance(spec, alphas[ai(rng)]);
    GameCache game(inst);
    const Coalition s = Coalition::all(n);
    const AllianceReport report = detect_alliance(game, s);
    if (!report.feasible || report.no_savings) continue;
    ++feasible;
    auto value = [&game](const Coalition& c) { return game.value(c); };
    CHECK_FALSE(complement_objection_exists(value, s, report.imputation, 1e-2));
  }
  CHECK(feasible == 100);
}

TEST_CASE("stability report aggregates every check") {
  const Instance inst = example_instance(2.0);
  GameCache game(inst);

  SECTION("the computed imputation passes everything") {
    const StabilityReport report =
        stability_report(game, Coalition::all(4), {168, 0, 24, 24}, 1e-2);
    CHECK(report.null_payment_ok);
    CHECK(report.nonnegativity_ok);
    CHECK_FALSE(report.justified_objection.has_value());
    CHECK(report.all_checks_pass());
    CHECK(report.feasibility_method == "vertex-enumeration");
    CHECK(report.pivotal == Coalition({0, 2, 3}));
  }

  SECTION("null players must not be paid") {
    const StabilityReport report =
        stability_report(game, Coalition::all(4), {163, 5, 24, 24}, 1e-2);
    CHECK_FALSE(report.null_payment_ok);
    CHECK(report.justified_objection.has_value());
    CHECK_FALSE(report.all_checks_pass());
  }

  SECTION("negative payoffs are flagged") {
    const StabilityReport report =
        stability_report(game, Coalition::all(4), {169, -1, 24, 24}, 1e-2);
    CHECK_FALSE(report.nonnegativity_ok);
  }

  SECTION("a skewed split trips the pairwise condition matrix") {
    const StabilityReport report =
        stability_report(game, Coalition({1, 3}), {0, 10, 0, 8}, 1e-3);
    CHECK_FALSE(report.counter_condition_matrix[3][1]);
    CHECK(report.counter_condition_matrix[1][3]);
    CHECK_FALSE(report.all_checks_pass());
  }

  SECTION("an all-zero vector is objection-free because singletons rebut") {
    const StabilityReport report =
        stability_report(game, Coalition::all(4), {0, 0, 0, 0}, 1e-2);
    CHECK(report.null_payment_ok);
    CHECK_FALSE(report.justified_objection.has_value());
  }

  SECTION("a single-organization coalition is vacuously stable") {
    const StabilityReport report = stability_report(game, Coalition({2}), {0, 0, 0, 0}, 1e-2);
    CHECK(report.all_checks_pass());
  }

  SECTION("payoff vector length must match the instance") {
    CHECK_THROWS_AS(stability_report(game, Coalition::all(4), {1.0, 2.0}, 1e-2),
                    std::invalid_argument);
  }
}

TEST_CASE("objection search enforces its size cap and epsilon domain") {
  TableGame v;
  const Coalition big = Coalition::all(13);
  const std::vector<double> x(13, 0.0);
  CHECK_THROWS_AS(justified_objection_search(v, big, x, 1e-2), std::invalid_argument);
  const Coalition small = Coalition::all(3);
  const std::vector<double> x3(3, 0.0);
  CHECK_THROWS_AS(justified_objection_search(v, small, x3, 0.0), std::invalid_argument);
}
