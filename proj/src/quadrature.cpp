#include "mobsense/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mobsense/errors.hpp"

namespace mobsense {

std::string to_string(QuadratureRule rule) {
  return rule == QuadratureRule::GaussLegendre ? "gauss-legendre" : "trapezoid";
}

QuadratureRule quadrature_rule_from_string(const std::string& name) {
  if (name == "gauss-legendre" || name == "gauss" || name == "gl") return QuadratureRule::GaussLegendre;
  if (name == "trapezoid") return QuadratureRule::Trapezoid;
  throw Error("unknown quadrature rule '" + name + "'");
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double QuadratureGrid::integrate(std::span<const double> samples) const {
  if (samples.size() != nodes.size()) throw RangeError("sample count does not match grid size");
  std::vector<double> terms(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) terms[i] = weights[i] * samples[i];
  return pairwise_sum(terms);
}

void gauss_legendre_rule(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw RangeError("Gauss-Legendre rule needs at least one point");
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) nodes[static_cast<std::size_t>(n / 2)] = 0.0;
}

namespace {

void fill_gauss(QuadratureGrid& g) {
  gauss_legendre_rule(g.points_per_panel, g.ref_nodes, g.ref_weights);
  const auto& ref_x = g.ref_nodes;
  const auto& ref_w = g.ref_weights;
  g.nodes.clear();
  g.weights.clear();
  g.nodes.reserve(g.panels() * ref_x.size());
  g.weights.reserve(g.panels() * ref_x.size());
  for (std::size_t p = 0; p + 1 < g.edges.size(); ++p) {
    const double a = g.edges[p], b = g.edges[p + 1];
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t k = 0; k < ref_x.size(); ++k) {
      g.nodes.push_back(mid + half * ref_x[k]);
      g.weights.push_back(half * ref_w[k]);
    }
  }
}

}  // namespace

QuadratureGrid make_quadrature(double horizon, int panels, int points_per_panel, QuadratureRule rule) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw RangeError("quadrature horizon must be positive");
  if (panels < 1) throw RangeError("quadrature needs at least one panel");
  QuadratureGrid g;
  g.rule = rule;
  g.horizon = horizon;
  g.edges.resize(static_cast<std::size_t>(panels) + 1);
  for (int p = 0; p <= panels; ++p) g.edges[static_cast<std::size_t>(p)] = horizon * p / panels;
  g.edges.back() = horizon;
  if (rule == QuadratureRule::Trapezoid) {
    g.points_per_panel = 2;
    g.nodes = g.edges;
    g.weights.assign(g.nodes.size(), horizon / panels);
    g.weights.front() *= 0.5;
    g.weights.back() *= 0.5;
    return g;
  }
  if (points_per_panel < 1) throw RangeError("Gauss-Legendre panels need at least one point");
  g.points_per_panel = points_per_panel;
  fill_gauss(g);
  return g;
}

QuadratureGrid make_quadrature_on_edges(std::vector<double> edges, int points_per_panel) {
  if (edges.size() < 2) throw RangeError("need at least two panel edges");
  if (edges.front() != 0.0) throw RangeError("panel edges must start at 0");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw RangeError("panel edges must strictly increase");
  }
  QuadratureGrid g;
  g.rule = QuadratureRule::GaussLegendre;
  g.horizon = edges.back();
  g.points_per_panel = points_per_panel;
  g.edges = std::move(edges);
  fill_gauss(g);
  return g;
}

QuadratureGrid default_grid(double horizon) {
  const int panels = std::max(1, static_cast<int>(std::lround(64.0 * horizon)));
  return make_quadrature(horizon, panels, 8);
}

QuadratureGrid refine(const QuadratureGrid& grid) {
  if (grid.rule == QuadratureRule::Trapezoid) {
    return make_quadrature(grid.horizon, static_cast<int>(2 * grid.panels()), 2, grid.rule);
  }
  std::vector<double> edges;
  edges.reserve(2 * grid.edges.size());
  for (std::size_t p = 0; p + 1 < grid.edges.size(); ++p) {
    edges.push_back(grid.edges[p]);
    edges.push_back(0.5 * (grid.edges[p] + grid.edges[p + 1]));
  }
  edges.push_back(grid.edges.back());
  return make_quadrature_on_edges(std::move(edges), grid.points_per_panel);
}

void append_piece(const QuadratureGrid& grid, double a, double b, std::vector<double>& nodes,
                  std::vector<double>& weights) {
  if (!(b > a)) return;
  if (grid.rule == QuadratureRule::Trapezoid) {
    const double h = 0.5 * (b - a);
    nodes.push_back(a);
    weights.push_back(h);
    nodes.push_back(b);
    weights.push_back(h);
    return;
  }
  const auto& ref_x = grid.ref_nodes;
  const auto& ref_w = grid.ref_weights;
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (std::size_t k = 0; k < ref_x.size(); ++k) {
    nodes.push_back(mid + half * ref_x[k]);
    weights.push_back(half * ref_w[k]);
  }
}

}  // namespace mobsense
