#include "mobsense/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mobsense/errors.hpp"
#include "mobsense/kernels.hpp"

namespace mobsense {

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-10;

struct Solver {
  kernels::Tableau t;
  std::size_t m = 0;           // constraint rows
  std::size_t structural = 0;  // columns before the artificials
  std::size_t columns = 0;     // structural + artificial
  std::vector<std::size_t> basis;
  bool parallel = true;
  int iterations = 0;

  std::size_t rhs() const { return columns; }
  std::size_t cost_row() const { return m; }
  std::size_t phase1_row() const { return m + 1; }

  void pivot(std::size_t row, std::size_t col) {
    if (parallel) {
      kernels::pivot_parallel(t, row, col);
    } else {
      kernels::pivot_serial(t, row, col);
    }
    basis[row] = col;
    ++iterations;
  }

  enum class Outcome { Optimal, Unbounded, Limit };

  Outcome run(std::size_t obj_row, double tol, int limit, int degenerate_switch) {
    int degenerate = 0;
    while (true) {
      if (iterations >= limit) return Outcome::Limit;
      const bool bland = degenerate >= degenerate_switch;
      std::size_t enter = columns;
      double best = -tol;
      for (std::size_t k = 0; k < structural; ++k) {
        const double d = t.at(obj_row, k);
        if (d < best) {
          enter = k;
          if (bland) break;
          best = d;
        }
      }
      if (enter == columns) return Outcome::Optimal;

      std::size_t leave = m;
      double ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        const double a = t.at(i, enter);
        if (a <= kPivotTol) continue;
        const double r = std::max(t.at(i, rhs()), 0.0) / a;
        const double slack = 1e-12 * std::max(1.0, r);
        if (leave == m || r < ratio - slack || (r <= ratio + slack && basis[i] < basis[leave])) {
          ratio = std::min(r, ratio);
          leave = i;
        }
      }
      if (leave == m) return Outcome::Unbounded;
      degenerate = ratio <= 1e-14 ? degenerate + 1 : 0;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpResult lp_solve(const LinearProgram& lp, const LpOptions& options) {
  const std::size_t n = lp.variables();
  const std::size_t m = lp.rows();
  if (static_cast<std::size_t>(lp.constraints.rows()) != m ||
      static_cast<std::size_t>(lp.constraints.cols()) != n) {
    throw RangeError("linear program dimensions are inconsistent");
  }
  if (!lp.free.empty() && lp.free.size() != n) throw RangeError("free-variable flags have the wrong length");
  for (double b : lp.rhs) {
    if (!std::isfinite(b)) throw RangeError("linear program right-hand side is not finite");
  }

  // Column layout: x_j (or its positive part), then negative parts of free
  // variables, then artificials.
  std::vector<std::size_t> neg_col(n, 0);
  std::size_t structural = n;
  for (std::size_t j = 0; j < n; ++j) {
    if (!lp.free.empty() && lp.free[j]) neg_col[j] = structural++;
  }

  std::vector<double> sign(m, 1.0);
  for (std::size_t i = 0; i < m; ++i) sign[i] = lp.rhs[i] < 0.0 ? -1.0 : 1.0;

  // Rows that already own a unit column start basic on it.
  std::vector<std::size_t> unit_basis(m, structural);
  for (std::size_t j = 0; j < n; ++j) {
    if (!lp.free.empty() && lp.free[j]) continue;
    std::size_t hit = m;
    bool unit = true;
    for (std::size_t i = 0; i < m && unit; ++i) {
      const double a = sign[i] * lp.constraints(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (a == 0.0) continue;
      if (a == 1.0 && hit == m) {
        hit = i;
      } else {
        unit = false;
      }
    }
    if (unit && hit < m && unit_basis[hit] == structural) unit_basis[hit] = j;
  }

  std::size_t artificials = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (unit_basis[i] == structural) ++artificials;
  }

  Solver s;
  s.m = m;
  s.structural = structural;
  s.columns = structural + artificials;
  s.parallel = options.parallel;
  s.t.rows = m + 2;
  s.t.cols = s.columns + 1;
  s.t.data.assign(s.t.rows * s.t.cols, 0.0);
  s.basis.assign(m, 0);

  std::size_t next_art = structural;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double a = sign[i] * lp.constraints(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      s.t.at(i, j) = a;
      if (neg_col[j] != 0) s.t.at(i, neg_col[j]) = -a;
    }
    s.t.at(i, s.rhs()) = sign[i] * lp.rhs[i];
    if (unit_basis[i] == structural) {
      s.t.at(i, next_art) = 1.0;
      s.basis[i] = next_art++;
    } else {
      s.basis[i] = unit_basis[i];
    }
  }

  // Objective rows hold reduced costs; their rhs entry is minus the value.
  double cost_scale = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    s.t.at(s.cost_row(), j) = lp.objective[j];
    if (neg_col[j] != 0) s.t.at(s.cost_row(), neg_col[j]) = -lp.objective[j];
    cost_scale = std::max(cost_scale, std::abs(lp.objective[j]));
  }
  for (std::size_t k = structural; k < s.columns; ++k) s.t.at(s.phase1_row(), k) = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t row : {s.cost_row(), s.phase1_row()}) {
      const double c = s.t.at(row, s.basis[i]);
      if (c == 0.0) continue;
      for (std::size_t k = 0; k < s.t.cols; ++k) s.t.at(row, k) -= c * s.t.at(i, k);
    }
  }

  double rhs_scale = 1.0;
  for (double b : lp.rhs) rhs_scale = std::max(rhs_scale, std::abs(b));
  const int limit = options.max_iterations > 0 ? options.max_iterations
                                               : static_cast<int>(50 * (m + s.columns) + 100);

  LpResult result;
  auto extract = [&]() {
    std::vector<double> xs(structural, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      if (s.basis[i] < structural) xs[s.basis[i]] = s.t.at(i, s.rhs());
    }
    result.x.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      result.x[j] = xs[j] - (neg_col[j] != 0 ? xs[neg_col[j]] : 0.0);
      if (neg_col[j] == 0) result.x[j] = std::max(result.x[j], 0.0);
    }
    result.value = 0.0;
    for (std::size_t j = 0; j < n; ++j) result.value += lp.objective[j] * result.x[j];
    result.iterations = s.iterations;
  };

  if (artificials > 0) {
    const auto outcome = s.run(s.phase1_row(), 1e-11 * rhs_scale, limit, options.degenerate_switch);
    if (outcome == Solver::Outcome::Limit) {
      extract();
      result.status = LpStatus::IterationLimit;
      return result;
    }
    if (-s.t.at(s.phase1_row(), s.rhs()) > 1e-9 * rhs_scale) {
      extract();
      result.status = LpStatus::Infeasible;
      return result;
    }
    // Drive remaining artificials out of the basis where a structural column allows it.
    for (std::size_t i = 0; i < m; ++i) {
      if (s.basis[i] < structural) continue;
      std::size_t best = structural;
      double mag = 1e-9;
      for (std::size_t k = 0; k < structural; ++k) {
        if (std::abs(s.t.at(i, k)) > mag) {
          mag = std::abs(s.t.at(i, k));
          best = k;
        }
      }
      if (best < structural) s.pivot(i, best);
    }
  }

  const auto outcome = s.run(s.cost_row(), 1e-11 * cost_scale, limit, options.degenerate_switch);
  extract();
  switch (outcome) {
    case Solver::Outcome::Optimal: result.status = LpStatus::Optimal; break;
    case Solver::Outcome::Unbounded: result.status = LpStatus::Unbounded; break;
    case Solver::Outcome::Limit: result.status = LpStatus::IterationLimit; break;
  }
  return result;
}

}  // namespace mobsense
