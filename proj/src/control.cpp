#include "mobsense/control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/QR>

#include "mobsense/errors.hpp"

namespace mobsense {

namespace {

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double t) {
  if (xs.empty()) return 0.0;
  if (t <= xs.front()) return ys.front();
  if (t >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - xs.begin());
  const double s = (t - xs[k - 1]) / (xs[k] - xs[k - 1]);
  return (1.0 - s) * ys[k - 1] + s * ys[k];
}

bool same_nodes(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

double dot_pairwise(std::span<const double> a, std::span<const double> b) {
  std::vector<double> terms(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) terms[i] = a[i] * b[i];
  return pairwise_sum(terms);
}

}  // namespace

int SignSwitch::sign_at(double t) const {
  const auto k = std::upper_bound(switch_times.begin(), switch_times.end(), t) - switch_times.begin();
  return (k % 2 == 0) ? initial_sign : -initial_sign;
}

int SignSwitch::final_sign() const { return switch_times.size() % 2 == 0 ? initial_sign : -initial_sign; }

double Amplitude::value_at(double t) const { return interpolate(times, values, t); }

double WeightProfile::value_at(double t) const { return interpolate(times, values, t); }

ControlSchedule::ControlSchedule(SignSwitch body, double horizon, std::optional<WeightProfile> weight)
    : body_(std::move(body)), horizon_(horizon), weight_(std::move(weight)) {
  validate();
}

ControlSchedule::ControlSchedule(Amplitude body, double horizon, std::optional<WeightProfile> weight)
    : body_(std::move(body)), horizon_(horizon), weight_(std::move(weight)) {
  validate();
}

ControlSchedule ControlSchedule::constant(double horizon, int sign) {
  return ControlSchedule(SignSwitch{sign >= 0 ? 1 : -1, {}}, horizon);
}

void ControlSchedule::validate() const {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) throw RangeError("control horizon must be positive");
  if (const auto* s = sign_switch()) {
    if (s->initial_sign != 1 && s->initial_sign != -1) throw RangeError("initial sign must be +1 or -1");
    double prev = 0.0;
    for (double t : s->switch_times) {
      if (!(t > prev) || !(t < horizon_)) throw RangeError("switch times must strictly increase inside (0, T)");
      prev = t;
    }
  } else {
    const auto& a = *amplitude();
    if (a.times.size() != a.values.size() || a.times.empty()) throw RangeError("amplitude samples are malformed");
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      if (i > 0 && !(a.times[i] > a.times[i - 1])) throw RangeError("amplitude times must strictly increase");
      if (!(std::abs(a.values[i]) <= 1.0 + 1e-12)) throw RangeError("control amplitude exceeds 1");
    }
  }
  if (weight_) {
    const auto& w = *weight_;
    if (w.times.size() != w.values.size() || w.times.empty()) throw RangeError("weight samples are malformed");
    for (double v : w.values) {
      if (!(v >= 0.0)) throw RangeError("weights must be non-negative");
    }
    if (!w.quadrature.empty()) {
      if (w.quadrature.size() != w.values.size()) throw RangeError("weight quadrature has the wrong length");
      const double mass = dot_pairwise(w.quadrature, w.values);
      if (std::abs(mass - horizon_) > 1e-8 * horizon_) throw RangeError("weights do not integrate to T");
    }
  }
}

double ControlSchedule::value_at(double t) const {
  const double c = sign_switch() ? static_cast<double>(sign_switch()->sign_at(t)) : amplitude()->value_at(t);
  return weight_ ? c * weight_->value_at(t) : c;
}

ControlQuadrature control_quadrature(const ControlSchedule& control, const QuadratureGrid& grid) {
  if (std::abs(grid.horizon - control.horizon()) > 1e-12 * control.horizon()) {
    throw RangeError("control horizon differs from the grid");
  }
  ControlQuadrature q;
  const auto* sw = control.sign_switch();
  if (sw && !control.weight()) {
    auto next = sw->switch_times.begin();
    for (std::size_t p = 0; p < grid.panels(); ++p) {
      double a = grid.edges[p];
      const double b = grid.edges[p + 1];
      while (next != sw->switch_times.end() && *next <= a) ++next;
      auto cut = next;
      while (true) {
        const double end = (cut != sw->switch_times.end() && *cut < b) ? *cut : b;
        const std::size_t before = q.times.size();
        append_piece(grid, a, end, q.times, q.coeff);
        const double s = sw->sign_at(0.5 * (a + end));
        for (std::size_t k = before; k < q.coeff.size(); ++k) q.coeff[k] *= s;
        if (end == b) break;
        a = end;
        ++cut;
      }
    }
    return q;
  }
  q.times = grid.nodes;
  q.coeff = grid.weights;
  const bool amp_on_nodes = !sw && same_nodes(control.amplitude()->times, grid.nodes);
  const bool weight_on_nodes = control.weight() && same_nodes(control.weight()->times, grid.nodes);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.nodes[i];
    double c;
    if (sw) {
      c = sw->sign_at(t);
    } else {
      c = amp_on_nodes ? control.amplitude()->values[i] : control.amplitude()->value_at(t);
    }
    if (control.weight()) c *= weight_on_nodes ? control.weight()->values[i] : control.weight()->value_at(t);
    q.coeff[i] *= c;
  }
  return q;
}

double phase_functional(const FieldExpr& field, const Path& path, const ControlSchedule& control,
                        const QuadratureGrid& grid, const ParamMap& params) {
  const auto q = control_quadrature(control, grid);
  const auto samples = sample_at(field, path, q.times, params);
  return dot_pairwise(q.coeff, samples);
}

CancellationReport verify_cancellation(const ControlSchedule& control, std::span<const FieldExpr> noise,
                                       const Path& path, const QuadratureGrid& grid, const ParamMap& params) {
  CancellationReport r;
  const auto q = control_quadrature(control, grid);
  for (const auto& g : noise) {
    const auto on_pieces = sample_at(g, path, q.times, params);
    r.residues.push_back(std::abs(dot_pairwise(q.coeff, on_pieces)));
    auto on_nodes = sample_composite(g, path, grid, params);
    for (auto& v : on_nodes) v = std::abs(v);
    r.norms.push_back(grid.integrate(on_nodes));
  }
  double max_norm = 0.0;
  for (std::size_t j = 0; j < r.residues.size(); ++j) {
    r.max_residue = std::max(r.max_residue, r.residues[j]);
    max_norm = std::max(max_norm, r.norms[j]);
  }
  r.threshold = 1e-7 * max_norm;
  r.passed = r.max_residue <= r.threshold;
  return r;
}

namespace {

// Signed residual f - sum alpha_j g_j at arbitrary times.
struct Residual {
  const FieldExpr& signal;
  std::span<const FieldExpr> noise;
  const std::vector<double>& alpha;
  const Path& path;
  const ParamMap& params;

  std::vector<double> at(std::span<const double> times) const {
    auto r = sample_at(signal, path, times, params);
    for (std::size_t j = 0; j < noise.size(); ++j) {
      const auto g = sample_at(noise[j], path, times, params);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] -= alpha[j] * g[i];
    }
    return r;
  }
  double at(double t) const {
    const double one[1] = {t};
    return at(std::span<const double>(one, 1))[0];
  }
};

double bisect_root(const Residual& r, double a, double b, int sign_a, double tol) {
  for (int iter = 0; iter < 200; ++iter) {
    if (b - a <= tol) return 0.5 * (a + b);
    const double mid = 0.5 * (a + b);
    const double v = r.at(mid);
    if ((v > 0.0 ? 1 : (v < 0.0 ? -1 : 0)) == sign_a) {
      a = mid;
    } else {
      b = mid;
    }
  }
  throw NumericalError("switch-time bisection did not converge");
}

std::vector<double> cancellation_residues(std::span<const FieldExpr> noise, const Path& path,
                                          const ControlSchedule& c, const QuadratureGrid& grid,
                                          const ParamMap& params) {
  const auto q = control_quadrature(c, grid);
  std::vector<double> out;
  for (const auto& g : noise) out.push_back(dot_pairwise(q.coeff, sample_at(g, path, q.times, params)));
  return out;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Newton iteration on R_j(tau) = integral g_j c_tau dt = 0 over the switch
// times. dR_j/dtau_k = 2 s_k g_j(tau_k), s_k the sign before switch k.
// Minimum-norm steps, halved until the order is kept and |R| decreases.
SignSwitch polish_switches(SignSwitch sw, std::span<const FieldExpr> noise, const Path& path,
                           const QuadratureGrid& grid, const ParamMap& params, double& final_residue) {
  const double T = grid.horizon;
  auto residues = cancellation_residues(noise, path, ControlSchedule(sw, T), grid, params);
  double current = max_abs(residues);
  const std::size_t K = sw.switch_times.size();
  const std::size_t n = noise.size();
  for (int iter = 0; iter < 50 && current > 0.0; ++iter) {
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(K));
    for (std::size_t j = 0; j < n; ++j) {
      const auto g = sample_at(noise[j], path, sw.switch_times, params);
      for (std::size_t k = 0; k < K; ++k) {
        const double s_before = (k % 2 == 0) ? sw.initial_sign : -sw.initial_sign;
        jac(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = 2.0 * s_before * g[k];
      }
    }
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) rhs(static_cast<Eigen::Index>(j)) = -residues[j];
    const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(rhs);

    bool improved = false;
    for (double lambda = 1.0; lambda > 1e-6; lambda *= 0.5) {
      SignSwitch trial = sw;
      bool ordered = true;
      for (std::size_t k = 0; k < K; ++k) {
        trial.switch_times[k] += lambda * step(static_cast<Eigen::Index>(k));
        const double lo = k == 0 ? 0.0 : trial.switch_times[k - 1];
        if (!(trial.switch_times[k] > lo) || !(trial.switch_times[k] < T)) ordered = false;
      }
      if (!ordered) continue;
      auto trial_res = cancellation_residues(noise, path, ControlSchedule(trial, T), grid, params);
      const double v = max_abs(trial_res);
      if (v < current) {
        sw = std::move(trial);
        residues = std::move(trial_res);
        current = v;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  final_residue = current;
  return sw;
}

}  // namespace

SignDesign optimal_sign_control(const FieldExpr& signal, std::span<const FieldExpr> noise, const Path& path,
                                const QuadratureGrid& grid, const SignDesignOptions& options) {
  const double T = path.horizon();
  const auto F = sample_composite(signal, path, grid, options.params);
  std::vector<std::vector<double>> G;
  for (const auto& g : noise) G.push_back(sample_composite(g, path, grid, options.params));

  if (!options.allow_dependent_signal) {
    auto all = G;
    all.push_back(F);
    if (!(sample_rank_ratio(all) > 1e-10)) {
      throw RankDeficientError(
          "signal and noise fields are linearly dependent along the path; "
          "choose a path on which they are independent (see design_independent_path)");
    }
  }
  L1Options lo;
  lo.parallel = options.parallel;
  L1Solution l1 = best_l1(F, G, grid, lo);

  const Residual residual{signal, noise, l1.alpha, path, options.params};
  std::vector<double> scan;
  scan.reserve(grid.size() + 2);
  scan.push_back(0.0);
  for (double t : grid.nodes) {
    if (t > scan.back()) scan.push_back(t);
  }
  if (T > scan.back()) scan.push_back(T);
  const auto r = residual.at(scan);

  SignSwitch sw;
  int last_sign = 0;
  double last_time = 0.0;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    if (std::abs(r[i]) <= l1.tol_coincidence) continue;
    const int s = r[i] > 0.0 ? 1 : -1;
    if (last_sign == 0) {
      sw.initial_sign = s;
    } else if (s != last_sign) {
      const double root = bisect_root(residual, last_time, scan[i], last_sign, 1e-12 * T);
      if (root > 0.0 && root < T && (sw.switch_times.empty() || root > sw.switch_times.back())) {
        sw.switch_times.push_back(root);
      }
    }
    last_sign = s;
    last_time = scan[i];
  }

  if (last_sign == 0) {
    ControlSchedule flat = ControlSchedule::constant(T);
    const double residue = max_abs(cancellation_residues(noise, path, flat, grid, options.params));
    const double sens = l1.residual_l1;
    return SignDesign{std::move(flat), sens, std::move(l1), true, residue};
  }

  double residue = 0.0;
  if (options.polish && !noise.empty() && !sw.switch_times.empty()) {
    sw = polish_switches(std::move(sw), noise, path, grid, options.params, residue);
  } else {
    residue = max_abs(cancellation_residues(noise, path, ControlSchedule(sw, T), grid, options.params));
  }
  ControlSchedule schedule(std::move(sw), T);
  const double sens = phase_functional(signal, path, schedule, grid, options.params);
  return SignDesign{std::move(schedule), sens, std::move(l1), false, residue};
}

HobbyRicePartition hobby_rice_partition(const SignSwitch& control, double horizon, int n) {
  HobbyRicePartition p;
  p.points.push_back(0.0);
  p.points.insert(p.points.end(), control.switch_times.begin(), control.switch_times.end());
  p.points.push_back(horizon);
  int s = control.initial_sign;
  for (std::size_t k = 0; k + 1 < p.points.size(); ++k) {
    p.signs.push_back(s);
    s = -s;
  }
  p.switch_count = static_cast<int>(control.switch_times.size());
  p.within_bound = p.switch_count <= n;
  return p;
}

BasisControl chebyshev_control(int m, double speed, double horizon) {
  if (m < 1) throw RangeError("Chebyshev control needs m >= 1");
  if (!(speed > 0.0) || !(horizon > 0.0)) throw RangeError("speed and horizon must be positive");
  SignSwitch sw;
  sw.initial_sign = (m % 2 == 0) ? 1 : -1;
  for (int j = 1; j <= m; ++j) {
    const double x = 0.5 * speed * horizon * (1.0 - std::cos(j * std::numbers::pi / (m + 1)));
    sw.switch_times.push_back(x / speed);
  }
  const double gain = (4.0 / speed) * std::pow(speed * horizon / 4.0, m + 1);
  Path path = Path::parametric({FieldExpr::constant(speed) * FieldExpr::time()}, horizon);
  return BasisControl{ControlSchedule(std::move(sw), horizon), gain, std::move(path)};
}

double legendre_p(int m, double x) {
  if (m < 0) throw RangeError("Legendre degree must be non-negative");
  double sum = 0.0;
  double binom = 1.0;  // C(m, k)
  for (int k = 0; k <= m; ++k) {
    sum += binom * binom * std::pow(x - 1.0, m - k) * std::pow(x + 1.0, k);
    binom = binom * (m - k) / (k + 1);
  }
  return std::ldexp(sum, -m);
}

BasisControl legendre_control(int m, double horizon, const QuadratureGrid& grid) {
  if (m < 0) throw RangeError("Legendre control needs m >= 0");
  if (std::abs(grid.horizon - horizon) > 1e-12 * horizon) throw RangeError("grid horizon differs from T");
  Amplitude amp;
  amp.times = grid.nodes;
  for (double t : grid.nodes) amp.values.push_back(std::clamp(legendre_p(m, (2.0 * t - horizon) / horizon), -1.0, 1.0));
  const FieldExpr T = FieldExpr::constant(horizon);
  Path path = Path::parametric({(FieldExpr::constant(2.0) * FieldExpr::time() - T) / T}, horizon);
  return BasisControl{ControlSchedule(std::move(amp), horizon), horizon / (2.0 * m + 1.0), std::move(path)};
}

BasisControl fourier_control(int m, double period, double phase, double horizon, const QuadratureGrid& grid,
                             HarmonicKind kind) {
  if (m < 1) throw RangeError("Fourier control needs m >= 1");
  if (!(period > 0.0)) throw RangeError("field period must be positive");
  if (std::abs(grid.horizon - horizon) > 1e-12 * horizon) throw RangeError("grid horizon differs from T");
  Amplitude amp;
  amp.times = grid.nodes;
  std::vector<double> test(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.nodes[i] * period / horizon;
    const double arg = 2.0 * std::numbers::pi * m * x / period + phase;
    amp.values.push_back(kind == HarmonicKind::Cosine ? std::cos(arg) : std::sin(arg));
    test[i] = std::cos(arg);
  }
  std::vector<double> terms(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) terms[i] = grid.weights[i] * test[i] * amp.values[i];
  const double gain = pairwise_sum(terms);
  Path path = Path::parametric({FieldExpr::constant(period / horizon) * FieldExpr::time()}, horizon);
  return BasisControl{ControlSchedule(std::move(amp), horizon), gain, std::move(path)};
}

VelocitySign decompose_velocity_sign(const Amplitude& control, const QuadratureGrid& grid) {
  std::vector<double> c(grid.size());
  const bool on_nodes = same_nodes(control.times, grid.nodes);
  for (std::size_t i = 0; i < grid.size(); ++i) c[i] = on_nodes ? control.values[i] : control.value_at(grid.nodes[i]);
  std::vector<double> mag(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) mag[i] = std::abs(c[i]);
  const double total = grid.integrate(mag);
  if (!(total > 0.0)) throw DomainError("control is identically zero");
  const double T = grid.horizon;
  const double scale = T / total;

  std::vector<double> w(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) w[i] = mag[i] * scale;

  SignSwitch sw;
  int last = 0;
  std::size_t last_i = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0.0) continue;
    const int s = c[i] > 0.0 ? 1 : -1;
    if (last == 0) {
      sw.initial_sign = s;
    } else if (s != last) {
      const double ta = grid.nodes[last_i], tb = grid.nodes[i];
      const double root = ta + (tb - ta) * c[last_i] / (c[last_i] - c[i]);
      sw.switch_times.push_back(std::clamp(root, std::nextafter(ta, tb), std::nextafter(tb, ta)));
    }
    last = s;
    last_i = i;
  }

  WeightProfile profile{grid.nodes, w, grid.weights};
  ControlSchedule combined(sw, T, profile);
  return VelocitySign{std::move(w), std::move(sw), scale, std::move(combined), {}};
}

VelocitySign decompose_velocity_sign(const Amplitude& control, const QuadratureGrid& grid,
                                     std::span<const double> h_weight) {
  if (h_weight.size() != grid.size()) throw RangeError("velocity weight count does not match the grid");
  VelocitySign out = decompose_velocity_sign(control, grid);
  const bool on_nodes = same_nodes(control.times, grid.nodes);
  out.effective.resize(grid.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double c = on_nodes ? control.values[i] : control.value_at(grid.nodes[i]);
    if (!(h_weight[i] > 0.0)) throw InfeasibleError("velocity weight vanishes at a grid node");
    out.effective[i] = c / h_weight[i];
    worst = std::max(worst, std::abs(out.effective[i]));
  }
  if (worst > 1.0 + 1e-12) {
    throw InfeasibleError("effective control c/w_h reaches " + std::to_string(worst) + " > 1");
  }
  return out;
}

}  // namespace mobsense
