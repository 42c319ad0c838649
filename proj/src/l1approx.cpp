#include "mobsense/l1approx.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "mobsense/errors.hpp"

namespace mobsense {

double sample_rank_ratio(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return 1.0;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto len = static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd a(len, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& r = rows[static_cast<std::size_t>(j)];
    if (static_cast<Eigen::Index>(r.size()) != len) throw RangeError("sample rows differ in length");
    for (Eigen::Index i = 0; i < len; ++i) a(i, j) = r[static_cast<std::size_t>(i)];
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0.0;
  if (sv.size() < n) return 0.0;
  return sv(sv.size() - 1) / sv(0);
}

L1Solution best_l1(std::span<const double> target, const std::vector<std::vector<double>>& basis,
                   const QuadratureGrid& grid, const L1Options& options) {
  const std::size_t N = grid.size();
  const std::size_t n = basis.size();
  if (target.size() != N) throw RangeError("target sample count does not match the grid");
  for (const auto& row : basis) {
    if (row.size() != N) throw RangeError("basis sample count does not match the grid");
  }
  if (N < n + 1) throw RangeError("grid needs at least n + 1 nodes");
  if (options.check_rank && n > 0) {
    const double ratio = sample_rank_ratio(basis);
    if (!(ratio > 1e-10)) {
      throw RankDeficientError("basis functions are linearly dependent on the grid (singular value ratio " +
                               std::to_string(ratio) + ")");
    }
  }

  L1Solution sol;
  sol.alpha.assign(n, 0.0);
  const double max_f = std::abs(*std::max_element(target.begin(), target.end(),
                                                  [](double a, double b) { return std::abs(a) < std::abs(b); }));

  if (max_f > 0.0 && n > 0) {
    LinearProgram lp;
    lp.objective.assign(n + 2 * N, 0.0);
    lp.constraints = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(n + 2 * N));
    lp.rhs.assign(target.begin(), target.end());
    lp.free.assign(n + 2 * N, false);
    for (std::size_t j = 0; j < n; ++j) lp.free[j] = true;
    for (std::size_t i = 0; i < N; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      for (std::size_t j = 0; j < n; ++j) lp.constraints(r, static_cast<Eigen::Index>(j)) = basis[j][i];
      lp.constraints(r, static_cast<Eigen::Index>(n + i)) = 1.0;
      lp.constraints(r, static_cast<Eigen::Index>(n + N + i)) = -1.0;
      lp.objective[n + i] = grid.weights[i];
      lp.objective[n + N + i] = grid.weights[i];
    }
    LpOptions lo;
    lo.parallel = options.parallel;
    const LpResult res = lp_solve(lp, lo);
    if (res.status != LpStatus::Optimal) {
      throw NumericalError("L1 linear program ended with status " + to_string(res.status));
    }
    std::copy_n(res.x.begin(), n, sol.alpha.begin());
    sol.lp_iterations = res.iterations;
  }

  sol.approximant.assign(N, 0.0);
  sol.residual.assign(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    double l = 0.0;
    for (std::size_t j = 0; j < n; ++j) l += sol.alpha[j] * basis[j][i];
    sol.approximant[i] = l;
    sol.residual[i] = target[i] - l;
  }
  double max_l = 0.0;
  for (double l : sol.approximant) max_l = std::max(max_l, std::abs(l));
  sol.tol_coincidence = 1e-8 * (max_f + max_l);

  std::vector<double> terms(N);
  sol.node_signs.assign(N, 0);
  sol.coincidence.assign(N, false);
  for (std::size_t i = 0; i < N; ++i) {
    const double r = sol.residual[i];
    terms[i] = grid.weights[i] * std::abs(r);
    if (std::abs(r) <= sol.tol_coincidence) {
      sol.coincidence[i] = true;
    } else {
      sol.node_signs[i] = r > 0.0 ? 1 : -1;
    }
  }
  sol.residual_l1 = pairwise_sum(terms);
  return sol;
}

double certificate_violation(const L1Solution& solution, const std::vector<std::vector<double>>& basis,
                             const QuadratureGrid& grid) {
  double worst = 0.0;
  for (const auto& g : basis) {
    double signed_sum = 0.0, slack = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double wg = grid.weights[i] * g[i];
      norm += std::abs(wg);
      if (solution.coincidence[i]) {
        slack += std::abs(wg);
      } else {
        signed_sum += wg * solution.node_signs[i];
      }
    }
    if (norm == 0.0) continue;
    worst = std::max(worst, (std::abs(signed_sum) - slack) / norm);
  }
  return worst;
}

}  // namespace mobsense
