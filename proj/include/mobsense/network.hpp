#pragma once

#include <span>
#include <vector>

#include "mobsense/fieldexpr.hpp"
#include "mobsense/simplex.hpp"
#include "mobsense/trajectory.hpp"

namespace mobsense {

using Matrix = std::vector<std::vector<double>>;  // rows

struct DfsSolution {
  std::vector<double> s_star;  // in [-1, 1]^N with G s* = 0
  double overlap = 0.0;        // <s, s*>, unique even when s* is not
  bool rank_deficient = false; // rows of G were dependent
  int lp_iterations = 0;
};

/// max <s, s'> over s' in [-1, 1]^N with G s' = 0, as the LP
/// min -s.x  s.t.  x + z = 2,  G x = G 1,  x, z >= 0  with s' = x - 1.
DfsSolution optimal_dfs_coefficients(std::span<const double> s, const Matrix& noise, const LpOptions& options = {});

/// 4 <s, s*>^2 T^2.
double dfs_qfi(std::span<const double> s, std::span<const double> s_star, double horizon);

struct MovingSensorQfi {
  double qfi = 0.0;
  std::vector<double> time_fractions;  // |s*_j| / ||s*||_1
  std::vector<int> signs;              // sgn(s*_j)
};

/// 4 (N/||s*||_1)^2 <s, s*>^2 T^2 with the dwell schedule that realises it.
MovingSensorQfi moving_sensor_qfi(std::span<const double> s, std::span<const double> s_star, int sites,
                                  double horizon);

/// (N/||s*||_1)^2.
double enhancement_factor(std::span<const double> s_star, int sites);

struct NetworkComparison {
  DfsSolution dfs;
  double dfs_qfi = 0.0;
  double moving_qfi = 0.0;
  double enhancement = 0.0;
  std::vector<double> time_fractions;
  std::vector<int> signs;
};

NetworkComparison compare_network(std::span<const double> s, const Matrix& noise, double horizon);

/// s_i = f(x_i), G_ji = g_j(x_i) at time 0.
void network_from_fields(const std::vector<Point>& positions, const FieldExpr& signal,
                         std::span<const FieldExpr> noise, const ParamMap& params, std::vector<double>& s,
                         Matrix& g);

}  // namespace mobsense
