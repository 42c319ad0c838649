#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "mobsense/fieldexpr.hpp"
#include "mobsense/quadrature.hpp"

namespace mobsense {

using Point = std::vector<double>;

/// Monotone time remap h: [0,T] -> [0,T] given on a grid of (t, h(t)) pairs.
///
/// Between grid points h is a monotone cubic Hermite interpolant. Node slopes
/// are central divided differences (one-sided at the ends), limited so the
/// interpolant stays monotone. The induced weight is w(tau) = (h^-1)'(tau).
class Reparametrization {
 public:
  Reparametrization(std::vector<double> times, std::vector<double> values);

  static Reparametrization identity(double horizon);

  double horizon() const noexcept { return times_.back(); }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& values() const noexcept { return values_; }

  double value(double t) const;
  double derivative(double t) const;
  double inverse(double tau) const;
  double weight(double tau) const;  // 1 / h'(h^-1(tau))

 private:
  std::vector<double> times_;
  std::vector<double> values_;
  std::vector<double> slopes_;

  std::size_t segment_of_time(double t) const;
};

/// Sensor trajectory gamma: [0,T] -> R^d.
class Path {
 public:
  struct Waypoints {
    std::vector<double> times;
    std::vector<Point> positions;
  };
  struct Parametric {
    std::vector<FieldExpr> coords;  // expressions in t
    ParamMap params;
  };
  struct Retimed {
    std::shared_ptr<const Path> base;
    std::shared_ptr<const Reparametrization> h;
  };

  static Path waypoints(std::vector<double> times, std::vector<Point> positions);
  static Path parametric(std::vector<FieldExpr> coords, double horizon, ParamMap params = {});
  /// tau -> base(h(tau)).
  static Path retimed(Path base, Reparametrization h);

  double horizon() const noexcept { return horizon_; }
  int dimension() const noexcept { return dimension_; }

  Point position_at(double t) const;
  void position_at(double t, std::span<double> out) const;

  const std::variant<Waypoints, Parametric, Retimed>& data() const noexcept { return data_; }

 private:
  Path(std::variant<Waypoints, Parametric, Retimed> data, double horizon, int dimension);

  std::variant<Waypoints, Parametric, Retimed> data_;
  double horizon_;
  int dimension_;
};

/// f(gamma(t_i), t_i) at every grid node.
std::vector<double> sample_composite(const FieldExpr& field, const Path& path, const QuadratureGrid& grid,
                                     const ParamMap& params = {});

/// f(gamma(t), t) at arbitrary times.
std::vector<double> sample_at(const FieldExpr& field, const Path& path, std::span<const double> times,
                              const ParamMap& params = {});

/// Result of retiming a path with h.
///
/// `grid` lives in the tau domain; its panel edges include every h(t_k) so
/// the weight is smooth inside each panel. `weight[i]` = w(tau_i) and
/// `source_time[i]` = h^-1(tau_i), the clock a time-dependent field sees.
struct ReparametrizedSampling {
  Path path;  // tau -> gamma(h(tau))
  QuadratureGrid grid;
  std::vector<double> weight;
  std::vector<double> source_time;
};

ReparametrizedSampling apply_reparametrization(const Path& path, const Reparametrization& h,
                                               const QuadratureGrid& base_grid);

/// Right-hand side of the change of variables:
/// sum_i q_i f(gamma(tau_i), h^-1(tau_i)) w(tau_i).
double reparametrized_phase(const FieldExpr& field, const Path& original, const ReparametrizedSampling& s,
                            const ParamMap& params = {});

/// w(tau_i) at the nodes of an arbitrary grid.
std::vector<double> weight_samples(const Reparametrization& h, const QuadratureGrid& grid);

struct Box {
  std::vector<std::pair<double, double>> bounds;  // per coordinate [lo, hi]
};

struct IndependentPathDesign {
  Path path;
  std::vector<Point> points;
  std::vector<double> times;  // visit times, strictly increasing in (0, T)
  double condition_number;
  int tries;
};

/// Sample point sets uniformly in `box` until (f_i(x_j, t_j)) has condition
/// number below `max_condition`, then join the points with straight segments.
/// Throws NumericalError (with the best condition seen) after `max_tries`.
IndependentPathDesign design_independent_path(std::span<const FieldExpr> fields, const Box& box,
                                              double horizon, std::uint64_t seed, int max_tries,
                                              const ParamMap& params = {}, double max_condition = 1e8);

}  // namespace mobsense
