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

#ifndef CHORGAME_DETAIL_LINEAR_FEASIBILITY_HPP
#define CHORGAME_DETAIL_LINEAR_FEASIBILITY_HPP

/// \file linear_feasibility.hpp
/// \brief Minimum-mass covering: min sum(u) subject to u >= 0 and
///        sum_{k in T} u_k >= g_T for a family of index sets T.
///
/// The family always admits a feasible point (make every u_k large), so the
/// minimum exists and is attained at a vertex. Two interchangeable solvers:
/// exhaustive vertex enumeration for a handful of variables, and a dense
/// two-phase simplex for the general case. Tests cross-check them.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace chorgame::detail {

/// One covering constraint: sum of u_k over the bits of mask is >= bound.
struct CoverRow {
  std::uint32_t mask = 0;
  double bound = 0.0;
};

struct CoverSolution {
  double total = 0.0;
  std::vector<double> u;
};

/// Drops constraints that cannot bind: non-positive bounds and rows dominated
/// by a subset-row with an equal or larger bound.
inline std::vector<CoverRow> simplify_cover_rows(std::vector<CoverRow> rows) {
  std::vector<CoverRow> kept;
  for (const CoverRow& row : rows) {
    if (row.bound <= 0.0) continue;
    bool dominated = false;
    for (const CoverRow& other : rows)
      if (other.mask != row.mask && (other.mask & row.mask) == other.mask &&
          other.bound >= row.bound) {
        dominated = true;
        break;
      }
    if (dominated) continue;
    bool merged = false;
    for (CoverRow& prev : kept)
      if (prev.mask == row.mask) {
        prev.bound = std::max(prev.bound, row.bound);
        merged = true;
        break;
      }
    if (!merged) kept.push_back(row);
  }
  return kept;
}

/// Exhaustive vertex enumeration: every vertex of {u >= 0, covers} is the
/// intersection of nvars linearly independent active constraints drawn from
/// the nonnegativity bounds and the cover rows.
inline CoverSolution min_mass_cover_vertex(int nvars, const std::vector<CoverRow>& rows_in) {
  CoverSolution best;
  best.u.assign(static_cast<std::size_t>(nvars), 0.0);
  const std::vector<CoverRow> rows = simplify_cover_rows(rows_in);
  if (nvars == 0 || rows.empty()) return best;  // u = 0 is optimal

  // Constraint list: coefficient masks and right-hand sides (a.u >= b).
  std::vector<std::uint32_t> amask;
  std::vector<double> rhs;
  for (int k = 0; k < nvars; ++k) {
    amask.push_back(std::uint32_t{1} << k);
    rhs.push_back(0.0);
  }
  for (const CoverRow& row : rows) {
    amask.push_back(row.mask);
    rhs.push_back(row.bound);
  }
  const int total = static_cast<int>(amask.size());

  double scale = 1.0;
  for (const CoverRow& row : rows) scale = std::max(scale, std::abs(row.bound));
  const double feas_tol = 1e-9 * scale;

  best.total = std::numeric_limits<double>::infinity();
  std::vector<int> pick(static_cast<std::size_t>(nvars));
  std::vector<double> a(static_cast<std::size_t>(nvars * (nvars + 1)));
  std::vector<double> u(static_cast<std::size_t>(nvars));

  // Iterate over all nvars-subsets of the constraints.
  std::vector<int> idx(static_cast<std::size_t>(nvars));
  for (int k = 0; k < nvars; ++k) idx[static_cast<std::size_t>(k)] = k;
  while (true) {
    // Solve the active system by Gaussian elimination.
    for (int r = 0; r < nvars; ++r) {
      const int c = idx[static_cast<std::size_t>(r)];
      for (int k = 0; k < nvars; ++k)
        a[static_cast<std::size_t>(r * (nvars + 1) + k)] =
            (amask[static_cast<std::size_t>(c)] >> k) & 1u ? 1.0 : 0.0;
      a[static_cast<std::size_t>(r * (nvars + 1) + nvars)] = rhs[static_cast<std::size_t>(c)];
    }
    bool singular = false;
    for (int col = 0; col < nvars && !singular; ++col) {
      int piv = -1;
      double pmax = 1e-9;
      for (int r = col; r < nvars; ++r) {
        const double cand = std::abs(a[static_cast<std::size_t>(r * (nvars + 1) + col)]);
        if (cand > pmax) { pmax = cand; piv = r; }
      }
      if (piv < 0) { singular = true; break; }
      if (piv != col)
        for (int k = col; k <= nvars; ++k)
          std::swap(a[static_cast<std::size_t>(piv * (nvars + 1) + k)],
                    a[static_cast<std::size_t>(col * (nvars + 1) + k)]);
      for (int r = 0; r < nvars; ++r) {
        if (r == col) continue;
        const double f = a[static_cast<std::size_t>(r * (nvars + 1) + col)] /
                         a[static_cast<std::size_t>(col * (nvars + 1) + col)];
        if (f == 0.0) continue;
        for (int k = col; k <= nvars; ++k)
          a[static_cast<std::size_t>(r * (nvars + 1) + k)] -=
              f * a[static_cast<std::size_t>(col * (nvars + 1) + k)];
      }
    }
    if (!singular) {
      for (int k = 0; k < nvars; ++k)
        u[static_cast<std::size_t>(k)] = a[static_cast<std::size_t>(k * (nvars + 1) + nvars)] /
                                         a[static_cast<std::size_t>(k * (nvars + 1) + k)];
      bool feasible = true;
      double mass = 0.0;
      for (int k = 0; k < nvars && feasible; ++k) {
        if (u[static_cast<std::size_t>(k)] < -feas_tol) feasible = false;
        mass += u[static_cast<std::size_t>(k)];
      }
      for (int c = 0; c < total && feasible; ++c) {
        double lhs = 0.0;
        for (int k = 0; k < nvars; ++k)
          if ((amask[static_cast<std::size_t>(c)] >> k) & 1u)
            lhs += u[static_cast<std::size_t>(k)];
        if (lhs < rhs[static_cast<std::size_t>(c)] - feas_tol) feasible = false;
      }
      if (feasible && mass < best.total) {
        best.total = mass;
        for (int k = 0; k < nvars; ++k)
          best.u[static_cast<std::size_t>(k)] = std::max(u[static_cast<std::size_t>(k)], 0.0);
      }
    }
    // next combination
    int pos = nvars - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == total - nvars + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (int k = pos + 1; k < nvars; ++k)
      idx[static_cast<std::size_t>(k)] = idx[static_cast<std::size_t>(k - 1)] + 1;
  }
  return best;
}

/// Dense two-phase simplex with Bland's rule. Layout: structural variables u,
/// then one surplus per row; artificials live implicitly in phase one.
inline CoverSolution min_mass_cover_simplex(int nvars, const std::vector<CoverRow>& rows_in) {
  CoverSolution out;
  out.u.assign(static_cast<std::size_t>(nvars), 0.0);
  const std::vector<CoverRow> rows = simplify_cover_rows(rows_in);
  if (nvars == 0 || rows.empty()) return out;

  const int r = static_cast<int>(rows.size());
  const int cols = nvars + r;          // u then surplus
  const int width = cols + r + 1;      // + artificials + rhs
  std::vector<double> t(static_cast<std::size_t>((r + 1) * width), 0.0);
  auto cell = [&t, width](int row, int col) -> double& {
    return t[static_cast<std::size_t>(row * width + col)];
  };

  for (int i = 0; i < r; ++i) {
    for (int k = 0; k < nvars; ++k)
      cell(i, k) = (rows[static_cast<std::size_t>(i)].mask >> k) & 1u ? 1.0 : 0.0;
    cell(i, nvars + i) = -1.0;          // surplus
    cell(i, cols + i) = 1.0;            // artificial
    cell(i, width - 1) = rows[static_cast<std::size_t>(i)].bound;  // > 0 after simplify
  }
  std::vector<int> basis(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) basis[static_cast<std::size_t>(i)] = cols + i;

  // Phase-one objective: minimize the artificial sum.
  for (int k = 0; k < width; ++k) {
    double s = 0.0;
    for (int i = 0; i < r; ++i) s += cell(i, k);
    cell(r, k) = -s;
  }
  for (int i = 0; i < r; ++i) cell(r, cols + i) = 0.0;

  const double piv_tol = 1e-9;
  auto pivot = [&](int prow, int pcol) {
    const double p = cell(prow, pcol);
    for (int k = 0; k < width; ++k) cell(prow, k) /= p;
    for (int i = 0; i <= r; ++i) {
      if (i == prow) continue;
      const double f = cell(i, pcol);
      if (f == 0.0) continue;
      for (int k = 0; k < width; ++k) cell(i, k) -= f * cell(prow, k);
    }
    basis[static_cast<std::size_t>(prow)] = pcol;
  };
  auto run = [&](int phase_cols) {
    while (true) {
      int pcol = -1;
      for (int k = 0; k < phase_cols; ++k)
        if (cell(r, k) < -piv_tol) { pcol = k; break; }  // Bland: first index
      if (pcol < 0) return;
      int prow = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < r; ++i) {
        if (cell(i, pcol) <= piv_tol) continue;
        const double ratio = cell(i, width - 1) / cell(i, pcol);
        if (prow < 0 || ratio < best_ratio - 1e-15 ||
            (std::abs(ratio - best_ratio) <= 1e-15 &&
             basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(prow)])) {
          prow = i;
          best_ratio = ratio;
        }
      }
      if (prow < 0) return;  // unbounded; cannot happen for covering systems
      pivot(prow, pcol);
    }
  };

  run(cols);  // structural and surplus columns only; artificials never re-enter

  // Drive any residual artificial out of the basis (degenerate rows).
  for (int i = 0; i < r; ++i) {
    if (basis[static_cast<std::size_t>(i)] < cols) continue;
    int pcol = -1;
    for (int k = 0; k < cols; ++k)
      if (std::abs(cell(i, k)) > piv_tol) { pcol = k; break; }
    if (pcol >= 0) pivot(i, pcol);
  }

  // Phase-two objective: minimize sum of u.
  for (int k = 0; k < width; ++k) cell(r, k) = 0.0;
  for (int k = 0; k < nvars; ++k) cell(r, k) = 1.0;
  for (int i = 0; i < r; ++i) {
    const int b = basis[static_cast<std::size_t>(i)];
    if (b < nvars) {
      for (int k = 0; k < width; ++k) cell(r, k) -= cell(i, k);
      cell(r, b) = 0.0;
    }
  }
  run(cols);  // artificials stay out in phase two

  for (int i = 0; i < r; ++i)
    if (basis[static_cast<std::size_t>(i)] < nvars)
      out.u[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])] =
          std::max(cell(i, width - 1), 0.0);
  for (double v : out.u) out.total += v;
  return out;
}

inline CoverSolution min_mass_cover(int nvars, const std::vector<CoverRow>& rows,
                                    bool exhaustive_vertices) {
  return exhaustive_vertices ? min_mass_cover_vertex(nvars, rows)
                             : min_mass_cover_simplex(nvars, rows);
}

}  // namespace chorgame::detail

#endif  // CHORGAME_DETAIL_LINEAR_FEASIBILITY_HPP
