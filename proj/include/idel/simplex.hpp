#pragma once

/// @file
/// Dense two-phase tableau simplex with Bland's anti-cycling rule, for
/// problems of the form  min cᵀx  s.t.  Ax = b,  x ≥ lower.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "idel/errors.hpp"

namespace idel {

struct LinearProgram {
  std::vector<double> objective;                 // length n
  std::vector<std::vector<double>> constraints;  // m rows of length n
  std::vector<double> rhs;                       // length m
  double lower_bound = 0.0;                      // applied to every variable
  /// Variables exempt from the lower bound (kept at ≥ 0).
  std::vector<bool> unbounded_below_exempt;
};

struct LpSolution {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
};

inline constexpr double kPivotTolerance = 1e-9;

namespace detail {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), w_(cols + 1), t_((rows + 1) * (cols + 1), 0.0) {}

  double& at(std::size_t r, std::size_t c) { return t_[r * w_ + c]; }
  double at(std::size_t r, std::size_t c) const { return t_[r * w_ + c]; }
  double& rhs(std::size_t r) { return t_[r * w_ + w_ - 1]; }
  // Row m_ holds reduced costs; its rhs holds minus the objective value.
  double& cost(std::size_t c) { return t_[m_ * w_ + c]; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double p = at(pr, pc);
    for (std::size_t c = 0; c < w_; ++c) at(pr, c) /= p;
    for (std::size_t r = 0; r <= m_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < w_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
  }

 private:
  std::size_t m_, w_;
  std::vector<double> t_;
};

}  // namespace detail

/// Solves the LP. Throws InfeasibleEpsilon when the lower bounds leave no
/// feasible point and SolverError on unboundedness or the iteration cap.
inline LpSolution solve_lp(const LinearProgram& lp) {
  const std::size_t n = lp.objective.size();
  const std::size_t m = lp.constraints.size();
  auto lb = [&](std::size_t j) {
    return j < lp.unbounded_below_exempt.size() && lp.unbounded_below_exempt[j] ? 0.0 : lp.lower_bound;
  };

  // Shift x = y + lb so that y ≥ 0, and make every rhs non-negative.
  std::vector<std::vector<double>> a = lp.constraints;
  std::vector<double> b = lp.rhs;
  for (std::size_t i = 0; i < m; ++i) {
    if (a[i].size() != n) throw SolverError("constraint row " + std::to_string(i) + " has wrong width");
    for (std::size_t j = 0; j < n; ++j) b[i] -= a[i][j] * lb(j);
    if (b[i] < 0.0) {
      b[i] = -b[i];
      for (double& v : a[i]) v = -v;
    }
  }

  const std::size_t cols = n + m;
  detail::Tableau t(m, cols);
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t.at(i, j) = a[i][j];
    t.at(i, n + i) = 1.0;
    t.rhs(i) = b[i];
    basis[i] = n + i;
  }
  // Phase 1: minimize the sum of artificials.
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += a[i][j];
    t.cost(j) = -s;
  }
  double bsum = 0.0;
  for (double v : b) bsum += v;
  t.cost(cols) = -bsum;

  const std::size_t cap = 10 * (m + cols) * (m + cols) + 10;
  std::size_t iterations = 0;
  std::vector<bool> active(m, true);

  auto run = [&](std::size_t allowed_cols) {
    while (true) {
      std::size_t enter = allowed_cols;
      for (std::size_t j = 0; j < allowed_cols; ++j) {
        if (t.cost(j) < -kPivotTolerance) {
          enter = j;
          break;
        }
      }
      if (enter == allowed_cols) return;
      std::size_t leave = m;
      double best = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (!active[i] || t.at(i, enter) <= kPivotTolerance) continue;
        const double ratio = t.rhs(i) / t.at(i, enter);
        if (leave == m || ratio < best - kPivotTolerance ||
            (ratio <= best + kPivotTolerance && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == m) throw SolverError("linear program is unbounded");
      if (++iterations > cap) {
        throw SolverError("simplex iteration cap " + std::to_string(cap) + " reached (rows=" + std::to_string(m) +
                          ", cols=" + std::to_string(n) + ")");
      }
      t.pivot(leave, enter);
      basis[leave] = enter;
    }
  };

  run(cols);
  const double infeasibility = -t.cost(cols);
  if (infeasibility > kPivotTolerance * std::max(1.0, bsum)) {
    throw InfeasibleEpsilon("no feasible point (phase-1 residual " + std::to_string(infeasibility) + ")");
  }

  // Drive artificials out of the basis; rows where that is impossible are
  // redundant and dropped.
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) continue;
    std::size_t j = 0;
    while (j < n && std::abs(t.at(i, j)) <= kPivotTolerance) ++j;
    if (j < n) {
      t.pivot(i, j);
      basis[i] = j;
    } else {
      active[i] = false;
    }
  }

  // Phase 2 reduced costs.
  for (std::size_t j = 0; j <= cols; ++j) t.cost(j) = j < n ? lp.objective[j] : 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!active[i]) continue;
    const double cb = lp.objective[basis[i]];
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j <= cols; ++j) t.cost(j) -= cb * t.at(i, j);
  }
  run(n);

  LpSolution sol;
  sol.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (active[i] && basis[i] < n) sol.x[basis[i]] = t.rhs(i);
  }
  for (std::size_t j = 0; j < n; ++j) {
    sol.x[j] += lb(j);
    sol.value += lp.objective[j] * sol.x[j];
  }
  sol.iterations = iterations;
  return sol;
}

}  // namespace idel
