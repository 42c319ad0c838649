#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

// min c.x s.t. A x = b, x >= 0 by enumerating every basis of A.
inline std::pair<bool, double> vertex_enumeration(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                                  const Eigen::VectorXd& c) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  std::vector<int> pick(static_cast<std::size_t>(m));
  std::iota(pick.begin(), pick.end(), 0);
  bool found = false;
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    Eigen::MatrixXd basis(m, m);
    for (int k = 0; k < m; ++k) basis.col(k) = a.col(pick[static_cast<std::size_t>(k)]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
    if (lu.isInvertible()) {
      const Eigen::VectorXd xb = lu.solve(b);
      if ((basis * xb - b).norm() <= 1e-9 * (1.0 + b.norm()) && xb.minCoeff() >= -1e-10) {
        double value = 0.0;
        for (int k = 0; k < m; ++k) value += c[pick[static_cast<std::size_t>(k)]] * xb[k];
        best = std::min(best, value);
        found = true;
      }
    }
    int k = m - 1;
    while (k >= 0 && pick[static_cast<std::size_t>(k)] == n - m + k) --k;
    if (k < 0) break;
    ++pick[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < m; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  return {found, best};
}

// max <s, x> over x in [-1, 1]^N with G x = 0. Vertices of that polytope have
// at least N - n coordinates at a bound; enumerate the free set and solve.
inline double dfs_vertex_oracle(const std::vector<double>& s, const std::vector<std::vector<double>>& g) {
  const int n_sites = static_cast<int>(s.size());
  const int n_rows = static_cast<int>(g.size());
  double best = -std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < (1 << n_sites); ++mask) {
    std::vector<int> free_idx, fixed_idx;
    for (int i = 0; i < n_sites; ++i) ((mask >> i) & 1 ? free_idx : fixed_idx).push_back(i);
    if (static_cast<int>(free_idx.size()) > n_rows) continue;
    const int nf = static_cast<int>(free_idx.size());
    const int n_fixed = static_cast<int>(fixed_idx.size());
    for (int signs = 0; signs < (1 << n_fixed); ++signs) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n_sites);
      for (int k = 0; k < n_fixed; ++k) x[fixed_idx[static_cast<std::size_t>(k)]] = (signs >> k) & 1 ? 1.0 : -1.0;
      Eigen::MatrixXd a(n_rows, nf);
      Eigen::VectorXd rhs(n_rows);
      for (int r = 0; r < n_rows; ++r) {
        double acc = 0.0;
        for (int i : fixed_idx) acc += g[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] * x[i];
        rhs[r] = -acc;
        for (int k = 0; k < nf; ++k) a(r, k) = g[static_cast<std::size_t>(r)][static_cast<std::size_t>(free_idx[static_cast<std::size_t>(k)])];
      }
      Eigen::VectorXd y = Eigen::VectorXd::Zero(nf);
      if (nf > 0) y = a.colPivHouseholderQr().solve(rhs);
      if (nf > 0 && (a * y - rhs).norm() > 1e-9 * (1.0 + rhs.norm())) continue;
      if (nf == 0 && rhs.norm() > 1e-9) continue;
      bool inside = true;
      for (int k = 0; k < nf; ++k) {
        if (std::abs(y[k]) > 1.0 + 1e-10) inside = false;
        x[free_idx[static_cast<std::size_t>(k)]] = y[k];
      }
      if (!inside) continue;
      double v = 0.0;
      for (int i = 0; i < n_sites; ++i) v += s[static_cast<std::size_t>(i)] * x[i];
      best = std::max(best, v);
    }
  }
  return best;
}

// Weighted median: smallest value whose cumulative weight reaches half.
inline double weighted_median(std::vector<double> values, std::vector<double> weights) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double acc = 0.0;
  for (auto i : order) {
    acc += weights[i];
    if (acc >= 0.5 * total) return values[i];
  }
  return values[order.back()];
}

// Composite trapezoid on a very fine uniform grid.
template <class F>
double trapezoid(F f, double a, double b, int intervals = 200000) {
  const double h = (b - a) / intervals;
  double sum = 0.5 * (f(a) + f(b));
  for (int i = 1; i < intervals; ++i) sum += f(a + i * h);
  return sum * h;
}

}  // namespace oracle
