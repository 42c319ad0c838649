#include "mobsense/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/SVD>

#include "mobsense/errors.hpp"
#include "mobsense/kernels.hpp"

namespace mobsense {

// ---------------------------------------------------------------------------
// Reparametrization
// ---------------------------------------------------------------------------

Reparametrization::Reparametrization(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() != values_.size() || times_.size() < 2) {
    throw RangeError("reparametrization needs at least two (t, h(t)) pairs of equal length");
  }
  const double T = times_.back();
  if (times_.front() != 0.0 || values_.front() != 0.0) throw RangeError("reparametrization must satisfy h(0) = 0");
  if (!(T > 0.0) || std::abs(values_.back() - T) > 1e-12 * T) {
    throw RangeError("reparametrization must satisfy h(T) = T");
  }
  values_.back() = T;
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) throw RangeError("reparametrization times must strictly increase");
    if (!(values_[i] > values_[i - 1])) throw RangeError("reparametrization is not strictly increasing");
  }

  const std::size_t n = times_.size();
  std::vector<double> secant(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    secant[k] = (values_[k + 1] - values_[k]) / (times_[k + 1] - times_[k]);
  }
  slopes_.resize(n);
  slopes_.front() = secant.front();
  slopes_.back() = secant.back();
  for (std::size_t k = 1; k + 1 < n; ++k) {
    slopes_[k] = (values_[k + 1] - values_[k - 1]) / (times_[k + 1] - times_[k - 1]);
  }
  // Fritsch-Carlson: keep (alpha, beta) inside the radius-3 disc.
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double a = slopes_[k] / secant[k];
    const double b = slopes_[k + 1] / secant[k];
    const double r2 = a * a + b * b;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      slopes_[k] = tau * a * secant[k];
      slopes_[k + 1] = tau * b * secant[k];
    }
  }
}

Reparametrization Reparametrization::identity(double horizon) {
  return Reparametrization({0.0, horizon}, {0.0, horizon});
}

std::size_t Reparametrization::segment_of_time(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t k = static_cast<std::size_t>(std::distance(times_.begin(), it));
  if (k == 0) return 0;
  return std::min(k - 1, times_.size() - 2);
}

double Reparametrization::value(double t) const {
  if (t < 0.0 || t > horizon()) throw RangeError("reparametrization evaluated outside [0, T]");
  const std::size_t k = segment_of_time(t);
  const double h = times_[k + 1] - times_[k];
  const double s = (t - times_[k]) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * values_[k] + (s3 - 2 * s2 + s) * h * slopes_[k] +
         (-2 * s3 + 3 * s2) * values_[k + 1] + (s3 - s2) * h * slopes_[k + 1];
}

double Reparametrization::derivative(double t) const {
  if (t < 0.0 || t > horizon()) throw RangeError("reparametrization evaluated outside [0, T]");
  const std::size_t k = segment_of_time(t);
  const double h = times_[k + 1] - times_[k];
  const double s = (t - times_[k]) / h;
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) * values_[k] + (6 * s - 6 * s2) * values_[k + 1]) / h +
         (3 * s2 - 4 * s + 1) * slopes_[k] + (3 * s2 - 2 * s) * slopes_[k + 1];
}

double Reparametrization::inverse(double tau) const {
  if (tau < 0.0 || tau > horizon()) throw RangeError("inverse reparametrization evaluated outside [0, T]");
  auto it = std::upper_bound(values_.begin(), values_.end(), tau);
  std::size_t k = static_cast<std::size_t>(std::distance(values_.begin(), it));
  k = k == 0 ? 0 : std::min(k - 1, values_.size() - 2);
  double lo = times_[k], hi = times_[k + 1];
  // Newton from the linear guess, falling back to bisection.
  double t = lo + (tau - values_[k]) / (values_[k + 1] - values_[k]) * (hi - lo);
  for (int iter = 0; iter < 100; ++iter) {
    const double f = value(t) - tau;
    if (f == 0.0) return t;
    if (f > 0.0) hi = t; else lo = t;
    const double d = derivative(t);
    double next = d > 0.0 ? t - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * (1.0 + std::abs(t))) return next;
    t = next;
  }
  return t;
}

double Reparametrization::weight(double tau) const {
  const double d = derivative(inverse(tau));
  if (!(d > 0.0)) throw NumericalError("reparametrization has a vanishing derivative");
  return 1.0 / d;
}

// ---------------------------------------------------------------------------
// Path
// ---------------------------------------------------------------------------

Path::Path(std::variant<Waypoints, Parametric, Retimed> data, double horizon, int dimension)
    : data_(std::move(data)), horizon_(horizon), dimension_(dimension) {}

Path Path::waypoints(std::vector<double> times, std::vector<Point> positions) {
  if (times.size() < 2 || times.size() != positions.size()) {
    throw RangeError("waypoint path needs at least two (time, position) pairs");
  }
  if (times.front() != 0.0) throw RangeError("waypoint times must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw RangeError("waypoint times must strictly increase");
  }
  const std::size_t d = positions.front().size();
  if (d == 0) throw RangeError("waypoint positions must have at least one coordinate");
  for (const auto& p : positions) {
    if (p.size() != d) throw RangeError("waypoint positions differ in dimension");
  }
  const double T = times.back();
  return Path(Waypoints{std::move(times), std::move(positions)}, T, static_cast<int>(d));
}

Path Path::parametric(std::vector<FieldExpr> coords, double horizon, ParamMap params) {
  if (coords.empty()) throw RangeError("parametric path needs at least one coordinate");
  if (!(horizon > 0.0)) throw RangeError("path horizon must be positive");
  for (const auto& c : coords) {
    if (c.dimension() > 0) throw RangeError("path coordinates may depend on t and parameters only");
    for (const auto& p : c.free_params()) {
      if (!params.contains(p)) throw UnboundParameterError(p);
    }
  }
  const int d = static_cast<int>(coords.size());
  return Path(Parametric{std::move(coords), std::move(params)}, horizon, d);
}

Path Path::retimed(Path base, Reparametrization h) {
  if (std::abs(base.horizon() - h.horizon()) > 1e-12 * base.horizon()) {
    throw RangeError("reparametrization horizon differs from the path horizon");
  }
  const double T = base.horizon();
  const int d = base.dimension();
  return Path(Retimed{std::make_shared<const Path>(std::move(base)),
                      std::make_shared<const Reparametrization>(std::move(h))},
              T, d);
}

Point Path::position_at(double t) const {
  Point p(static_cast<std::size_t>(dimension_));
  position_at(t, p);
  return p;
}

void Path::position_at(double t, std::span<double> out) const {
  if (!(t >= 0.0 && t <= horizon_)) throw RangeError("time outside [0, T]");
  if (out.size() < static_cast<std::size_t>(dimension_)) throw RangeError("output buffer too small");
  if (const auto* w = std::get_if<Waypoints>(&data_)) {
    auto it = std::upper_bound(w->times.begin(), w->times.end(), t);
    std::size_t k = static_cast<std::size_t>(std::distance(w->times.begin(), it));
    k = k == 0 ? 0 : std::min(k - 1, w->times.size() - 2);
    const double s = (t - w->times[k]) / (w->times[k + 1] - w->times[k]);
    for (std::size_t i = 0; i < static_cast<std::size_t>(dimension_); ++i) {
      out[i] = (1.0 - s) * w->positions[k][i] + s * w->positions[k + 1][i];
    }
  } else if (const auto* p = std::get_if<Parametric>(&data_)) {
    for (std::size_t i = 0; i < p->coords.size(); ++i) out[i] = p->coords[i].eval({}, t, p->params);
  } else {
    const auto& r = std::get<Retimed>(data_);
    r.base->position_at(r.h->value(t), out);
  }
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

std::vector<double> sample_at(const FieldExpr& field, const Path& path, std::span<const double> times,
                              const ParamMap& params) {
  if (field.dimension() > path.dimension()) {
    throw RangeError("field uses x" + std::to_string(field.dimension()) + " but the path has dimension " +
                     std::to_string(path.dimension()));
  }
  std::vector<double> out(times.size());
  kernels::sample_field_parallel(field, path, times, params, out);
  return out;
}

std::vector<double> sample_composite(const FieldExpr& field, const Path& path, const QuadratureGrid& grid,
                                     const ParamMap& params) {
  if (std::abs(grid.horizon - path.horizon()) > 1e-12 * path.horizon()) {
    throw RangeError("grid horizon differs from the path horizon");
  }
  return sample_at(field, path, grid.nodes, params);
}

ReparametrizedSampling apply_reparametrization(const Path& path, const Reparametrization& h,
                                               const QuadratureGrid& base_grid) {
  const double T = path.horizon();
  if (std::abs(h.horizon() - T) > 1e-12 * T) throw RangeError("reparametrization horizon differs from path");
  std::vector<double> edges = base_grid.edges;
  edges.insert(edges.end(), h.values().begin(), h.values().end());
  std::sort(edges.begin(), edges.end());
  std::vector<double> merged;
  merged.reserve(edges.size());
  for (double e : edges) {
    if (merged.empty() || e - merged.back() > 1e-13 * T) merged.push_back(e);
  }
  merged.front() = 0.0;
  merged.back() = T;
  const int q = base_grid.rule == QuadratureRule::GaussLegendre ? base_grid.points_per_panel : 8;

  ReparametrizedSampling out{Path::retimed(path, h), make_quadrature_on_edges(std::move(merged), q), {}, {}};
  out.weight.resize(out.grid.size());
  out.source_time.resize(out.grid.size());
  for (std::size_t i = 0; i < out.grid.size(); ++i) {
    out.source_time[i] = h.inverse(out.grid.nodes[i]);
    const double d = h.derivative(out.source_time[i]);
    if (!(d > 0.0)) throw NumericalError("reparametrization has a vanishing derivative");
    out.weight[i] = 1.0 / d;
  }
  return out;
}

double reparametrized_phase(const FieldExpr& field, const Path& original, const ReparametrizedSampling& s,
                            const ParamMap& params) {
  Point x(static_cast<std::size_t>(original.dimension()));
  std::vector<double> terms(s.grid.size());
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    original.position_at(s.grid.nodes[i], x);
    terms[i] = s.grid.weights[i] * field.eval(x, s.source_time[i], params) * s.weight[i];
  }
  return pairwise_sum(terms);
}

std::vector<double> weight_samples(const Reparametrization& h, const QuadratureGrid& grid) {
  std::vector<double> w(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) w[i] = h.weight(grid.nodes[i]);
  return w;
}

// ---------------------------------------------------------------------------
// Independent-path designer
// ---------------------------------------------------------------------------

IndependentPathDesign design_independent_path(std::span<const FieldExpr> fields, const Box& box,
                                              double horizon, std::uint64_t seed, int max_tries,
                                              const ParamMap& params, double max_condition) {
  const std::size_t m = fields.size();
  if (m == 0) throw RangeError("need at least one field");
  if (!(horizon > 0.0)) throw RangeError("path horizon must be positive");
  int d = 1;
  for (const auto& f : fields) d = std::max(d, f.dimension());
  if (box.bounds.size() < static_cast<std::size_t>(d)) throw RangeError("box has fewer coordinates than the fields use");
  for (const auto& [lo, hi] : box.bounds) {
    if (!(hi >= lo)) throw RangeError("box bounds must satisfy lo <= hi");
  }
  const std::size_t dim = box.bounds.size();

  std::vector<double> times(m);
  for (std::size_t j = 0; j < m; ++j) times[j] = horizon * static_cast<double>(j + 1) / static_cast<double>(m + 1);

  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  double best = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd M(m, m);
  for (int attempt = 1; attempt <= max_tries; ++attempt) {
    std::vector<Point> pts(m, Point(dim));
    for (auto& p : pts) {
      for (std::size_t i = 0; i < dim; ++i) {
        const auto [lo, hi] = box.bounds[i];
        p[i] = lo + (hi - lo) * uniform();
      }
    }
    bool ok = true;
    try {
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            fields[i].eval(pts[j], times[j], params);
      }
    } catch (const EvalError&) {
      ok = false;
    }
    if (!ok) continue;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    const double smax = sv(0), smin = sv(sv.size() - 1);
    const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    best = std::min(best, cond);
    if (cond < max_condition) {
      std::vector<double> wt{0.0};
      std::vector<Point> wp{pts.front()};
      for (std::size_t j = 0; j < m; ++j) {
        wt.push_back(times[j]);
        wp.push_back(pts[j]);
      }
      wt.push_back(horizon);
      wp.push_back(pts.back());
      return {Path::waypoints(std::move(wt), std::move(wp)), std::move(pts), times, cond, attempt};
    }
  }
  throw NumericalError("no well-conditioned point set found after " + std::to_string(max_tries) +
                       " tries (best condition number " + std::to_string(best) +
                       "); the fields may be linearly dependent");
}

}  // namespace mobsense
