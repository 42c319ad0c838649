#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mobsense {

/// minimize c.x  subject to  A x = b,  x_j >= 0 unless free[j].
struct LinearProgram {
  std::vector<double> objective;
  Eigen::MatrixXd constraints;
  std::vector<double> rhs;
  std::vector<bool> free;  // empty means all non-negative

  std::size_t variables() const noexcept { return objective.size(); }
  std::size_t rows() const noexcept { return rhs.size(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string to_string(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  std::vector<double> x;  // best point reached (feasible unless Infeasible)
  int iterations = 0;
};

struct LpOptions {
  int max_iterations = 0;  // 0: 50 * (rows + columns)
  bool parallel = true;    // OpenMP pivots
  // Dantzig pricing until this many degenerate pivots in a row, then
  // Bland's rule until the objective moves again.
  int degenerate_switch = 50;
};

/// Two-phase dense tableau simplex. Free variables are split into positive
/// and negative parts; rows already holding a unit column start basic on it,
/// the rest get artificials.
LpResult lp_solve(const LinearProgram& lp, const LpOptions& options = {});

}  // namespace mobsense
