#pragma once

#include <span>
#include <vector>

#include "mobsense/quadrature.hpp"
#include "mobsense/simplex.hpp"

namespace mobsense {

/// Best weighted-L1 fit of a target sample vector from a span of basis samples.
struct L1Solution {
  std::vector<double> alpha;        // basis coefficients
  std::vector<double> approximant;  // L_i = sum_j alpha_j G_j(t_i)
  std::vector<double> residual;     // F_i - L_i
  double residual_l1 = 0.0;         // sum_i w_i |F_i - L_i|
  std::vector<int> node_signs;      // sign of the residual, 0 on coincidence
  std::vector<bool> coincidence;    // |F_i - L_i| <= tol_coincidence
  double tol_coincidence = 0.0;
  int lp_iterations = 0;
};

struct L1Options {
  bool parallel = true;
  bool check_rank = true;
};

/// basis[j][i] = G_j(t_i). Throws RankDeficientError when the basis rows are
/// dependent on the grid (smallest singular value <= 1e-10 largest) and
/// NumericalError when the LP does not reach optimality.
L1Solution best_l1(std::span<const double> target, const std::vector<std::vector<double>>& basis,
                   const QuadratureGrid& grid, const L1Options& options = {});

/// Worst certificate slack over the basis rows, relative to ||G_j||_1:
///   max_j (|sum_i w_i G_j(t_i) sigma_i| - sum_{i in Z} w_i |G_j(t_i)|) / ||G_j||_1.
/// The solution is certified optimal when this is <= 1e-7.
double certificate_violation(const L1Solution& solution, const std::vector<std::vector<double>>& basis,
                             const QuadratureGrid& grid);

/// Smallest over largest singular value of the N x n sample matrix.
double sample_rank_ratio(const std::vector<std::vector<double>>& rows);

}  // namespace mobsense
