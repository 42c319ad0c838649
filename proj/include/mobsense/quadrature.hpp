#pragma once

#include <span>
#include <string>
#include <vector>

namespace mobsense {

enum class QuadratureRule { GaussLegendre, Trapezoid };

std::string to_string(QuadratureRule rule);
QuadratureRule quadrature_rule_from_string(const std::string& name);

/// Nodes and weights discretizing [0, T].
///
/// Gauss-Legendre grids are composite: `edges` are the panel boundaries and
/// every panel carries `points_per_panel` nodes. Trapezoid grids have one node
/// per edge. Nodes strictly increase and the weights sum to T.
struct QuadratureGrid {
  QuadratureRule rule = QuadratureRule::GaussLegendre;
  double horizon = 0.0;
  int points_per_panel = 0;
  std::vector<double> edges;
  std::vector<double> nodes;
  std::vector<double> weights;
  // Per-panel rule on [-1, 1] (Gauss-Legendre only).
  std::vector<double> ref_nodes;
  std::vector<double> ref_weights;

  std::size_t size() const noexcept { return nodes.size(); }
  std::size_t panels() const noexcept { return edges.empty() ? 0 : edges.size() - 1; }

  /// Weighted sum of samples, pairwise summation.
  double integrate(std::span<const double> samples) const;
};

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre_rule(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Uniform composite grid. For the trapezoid rule `panels` is the number of
/// intervals and `points_per_panel` is ignored.
QuadratureGrid make_quadrature(double horizon, int panels, int points_per_panel,
                               QuadratureRule rule = QuadratureRule::GaussLegendre);

/// Composite Gauss-Legendre grid on arbitrary increasing panel edges.
QuadratureGrid make_quadrature_on_edges(std::vector<double> edges, int points_per_panel);

/// 64 panels x 8 points per unit of T (at least one panel).
QuadratureGrid default_grid(double horizon);

/// Same rule with twice as many panels.
QuadratureGrid refine(const QuadratureGrid& grid);

/// Integrate over [a, b] using the grid's per-panel rule on a single piece.
/// Emits (node, weight) pairs; used to split panels at discontinuities.
void append_piece(const QuadratureGrid& grid, double a, double b, std::vector<double>& nodes,
                  std::vector<double>& weights);

double pairwise_sum(std::span<const double> values);

}  // namespace mobsense
