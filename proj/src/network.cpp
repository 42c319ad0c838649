#include "mobsense/network.hpp"

#include <algorithm>
#include <cmath>

#include "mobsense/errors.hpp"
#include "mobsense/l1approx.hpp"

namespace mobsense {

DfsSolution optimal_dfs_coefficients(std::span<const double> s, const Matrix& noise, const LpOptions& options) {
  const std::size_t N = s.size();
  const std::size_t n = noise.size();
  if (N == 0) throw RangeError("network needs at least one site");
  for (const auto& row : noise) {
    if (row.size() != N) throw RangeError("noise row length differs from the number of sites");
  }

  DfsSolution out;
  if (n > 0) out.rank_deficient = !(sample_rank_ratio(noise) > 1e-10);

  // Columns: x (N), z (N). Rows: x_i + z_i = 2, then G x = G 1.
  LinearProgram lp;
  lp.objective.assign(2 * N, 0.0);
  for (std::size_t i = 0; i < N; ++i) lp.objective[i] = -s[i];
  lp.constraints = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N + n), static_cast<Eigen::Index>(2 * N));
  lp.rhs.assign(N + n, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    lp.constraints(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    lp.constraints(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(N + i)) = 1.0;
    lp.rhs[i] = 2.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    double row_sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      lp.constraints(static_cast<Eigen::Index>(N + j), static_cast<Eigen::Index>(i)) = noise[j][i];
      row_sum += noise[j][i];
    }
    lp.rhs[N + j] = row_sum;
  }
  const LpResult res = lp_solve(lp, options);
  if (res.status != LpStatus::Optimal) {
    throw NumericalError("DFS coefficient LP ended with status " + to_string(res.status));
  }
  out.lp_iterations = res.iterations;
  out.s_star.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    out.s_star[i] = std::clamp(res.x[i] - 1.0, -1.0, 1.0);
    out.overlap += s[i] * out.s_star[i];
  }
  return out;
}

double dfs_qfi(std::span<const double> s, std::span<const double> s_star, double horizon) {
  if (s.size() != s_star.size()) throw RangeError("s and s* differ in length");
  double overlap = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) overlap += s[i] * s_star[i];
  return 4.0 * overlap * overlap * horizon * horizon;
}

namespace {

double l1_norm(std::span<const double> v) {
  double a = 0.0;
  for (double x : v) a += std::abs(x);
  return a;
}

}  // namespace

MovingSensorQfi moving_sensor_qfi(std::span<const double> s, std::span<const double> s_star, int sites,
                                  double horizon) {
  const double norm = l1_norm(s_star);
  if (!(norm > 0.0)) throw DomainError("s* is identically zero");
  MovingSensorQfi out;
  const double gain = sites / norm;
  out.qfi = gain * gain * dfs_qfi(s, s_star, horizon);
  for (double x : s_star) {
    out.time_fractions.push_back(std::abs(x) / norm);
    out.signs.push_back(x > 0.0 ? 1 : (x < 0.0 ? -1 : 0));
  }
  return out;
}

double enhancement_factor(std::span<const double> s_star, int sites) {
  const double norm = l1_norm(s_star);
  if (!(norm > 0.0)) throw DomainError("s* is identically zero");
  const double gain = sites / norm;
  return gain * gain;
}

NetworkComparison compare_network(std::span<const double> s, const Matrix& noise, double horizon) {
  NetworkComparison c;
  c.dfs = optimal_dfs_coefficients(s, noise);
  c.dfs_qfi = dfs_qfi(s, c.dfs.s_star, horizon);
  const int N = static_cast<int>(s.size());
  if (l1_norm(c.dfs.s_star) > 0.0) {
    const auto moving = moving_sensor_qfi(s, c.dfs.s_star, N, horizon);
    c.moving_qfi = moving.qfi;
    c.enhancement = enhancement_factor(c.dfs.s_star, N);
    c.time_fractions = moving.time_fractions;
    c.signs = moving.signs;
  }
  return c;
}

void network_from_fields(const std::vector<Point>& positions, const FieldExpr& signal,
                         std::span<const FieldExpr> noise, const ParamMap& params, std::vector<double>& s,
                         Matrix& g) {
  s.clear();
  g.assign(noise.size(), {});
  for (const auto& x : positions) {
    s.push_back(signal.eval(x, 0.0, params));
    for (std::size_t j = 0; j < noise.size(); ++j) g[j].push_back(noise[j].eval(x, 0.0, params));
  }
}

}  // namespace mobsense
