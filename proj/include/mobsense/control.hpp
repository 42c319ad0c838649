#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "mobsense/fieldexpr.hpp"
#include "mobsense/l1approx.hpp"
#include "mobsense/quadrature.hpp"
#include "mobsense/trajectory.hpp"

namespace mobsense {

/// Piecewise-constant +-1 control.
struct SignSwitch {
  int initial_sign = 1;
  std::vector<double> switch_times;  // strictly increasing, inside (0, T)

  int sign_at(double t) const;  // sign just after t; at a switch the new sign
  int final_sign() const;
};

/// Control samples with linear interpolation; |c| <= 1.
struct Amplitude {
  std::vector<double> times;
  std::vector<double> values;

  double value_at(double t) const;
};

/// Non-negative velocity-schedule weight, linearly interpolated. When
/// `quadrature` is given (weights for `times`), sum quadrature * values must be T.
struct WeightProfile {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> quadrature;

  double value_at(double t) const;
};

class ControlSchedule {
 public:
  ControlSchedule(SignSwitch body, double horizon, std::optional<WeightProfile> weight = std::nullopt);
  ControlSchedule(Amplitude body, double horizon, std::optional<WeightProfile> weight = std::nullopt);

  static ControlSchedule constant(double horizon, int sign = 1);

  double horizon() const noexcept { return horizon_; }
  const std::variant<SignSwitch, Amplitude>& body() const noexcept { return body_; }
  const SignSwitch* sign_switch() const noexcept { return std::get_if<SignSwitch>(&body_); }
  const Amplitude* amplitude() const noexcept { return std::get_if<Amplitude>(&body_); }
  const std::optional<WeightProfile>& weight() const noexcept { return weight_; }

  // c(t) (times the weight, if any).
  double value_at(double t) const;

 private:
  void validate() const;

  std::variant<SignSwitch, Amplitude> body_;
  double horizon_;
  std::optional<WeightProfile> weight_;
};

/// Quadrature nodes/weights carrying c(t) (and the weight profile) folded in:
/// integral of f(gamma(t), t) c(t) dt = sum_k coeff[k] f(gamma(times[k]), times[k]).
/// Unweighted sign schedules split panels at the switch times so every piece
/// has constant sign; weighted schedules use node values on the given grid.
struct ControlQuadrature {
  std::vector<double> times;
  std::vector<double> coeff;
};

ControlQuadrature control_quadrature(const ControlSchedule& control, const QuadratureGrid& grid);

/// Integral of f(gamma(t), t) c(t) dt.
double phase_functional(const FieldExpr& field, const Path& path, const ControlSchedule& control,
                        const QuadratureGrid& grid, const ParamMap& params = {});

struct SignDesignOptions {
  ParamMap params;
  bool parallel = true;
  // Refine the switch times by Newton iteration on the continuous
  // cancellation conditions after extracting them from the grid residual.
  bool polish = true;
  // Skip the rank check of {f, g_j}; used to study signals inside the noise span.
  bool allow_dependent_signal = false;
};

struct SignDesign {
  ControlSchedule schedule;
  double sensitivity;          // integral of f c for the returned schedule
  L1Solution l1;               // grid L1 fit of f by the noise span
  bool signal_in_noise_span;   // residual vanished on every node
  double polish_residual;      // max_j |integral g_j c| after polishing
};

/// Optimal noise-cancelling sign control sgn(f - L(alpha*)). Throws
/// RankDeficientError when f and the noise fields are dependent along the path.
SignDesign optimal_sign_control(const FieldExpr& signal, std::span<const FieldExpr> noise, const Path& path,
                                const QuadratureGrid& grid, const SignDesignOptions& options = {});

struct CancellationReport {
  std::vector<double> residues;  // |integral g_j c|
  std::vector<double> norms;     // ||g_j o gamma||_1
  double max_residue = 0.0;
  double threshold = 0.0;        // 1e-7 max_j norms
  bool passed = true;
};

CancellationReport verify_cancellation(const ControlSchedule& control, std::span<const FieldExpr> noise,
                                       const Path& path, const QuadratureGrid& grid,
                                       const ParamMap& params = {});

struct HobbyRicePartition {
  std::vector<double> points;  // 0 = t_0 < ... < t_m = T
  std::vector<int> signs;      // one per interval
  int switch_count = 0;
  bool within_bound = true;    // switch_count <= n
};

HobbyRicePartition hobby_rice_partition(const SignSwitch& control, double horizon, int n);

struct BasisControl {
  ControlSchedule schedule;
  double gain;  // Phase picked up by the matched unit basis function
  Path path;
};

/// Switches at (T/2)(1 - cos(j pi/(m+1))); gain (4/v)(vT/4)^(m+1) for
/// f = x^m along x = v t.
BasisControl chebyshev_control(int m, double speed, double horizon);

/// Legendre polynomial by the explicit sum 2^-m sum_k C(m,k)^2 (x-1)^(m-k) (x+1)^k.
double legendre_p(int m, double x);

/// Amplitude control P_m(gamma(t)) along gamma(t) = (2t - T)/T on the grid
/// nodes; gain T/(2m+1).
BasisControl legendre_control(int m, double horizon, const QuadratureGrid& grid);

enum class HarmonicKind { Cosine, Sine };

/// Amplitude control cos(2 pi m x/P + phase) (or sin) along x = tP/T. The gain
/// is the quadrature of the control against the unit cosine harmonic
/// cos(2 pi m x/P + phase).
BasisControl fourier_control(int m, double period, double phase, double horizon, const QuadratureGrid& grid,
                             HarmonicKind kind = HarmonicKind::Cosine);

struct VelocitySign {
  std::vector<double> weight;  // w(t_i) = |c_i| T / integral |c|
  SignSwitch sign;
  double scale;                // T / integral |c|
  ControlSchedule combined;    // sign schedule carrying the weight profile
  std::vector<double> effective;  // c / w_h, only for the reparametrized overload
};

/// Split an amplitude control sampled on the grid nodes into a weight and a
/// sign schedule; the combined schedule reproduces scale * (original phase).
VelocitySign decompose_velocity_sign(const Amplitude& control, const QuadratureGrid& grid);

/// Same, for a path retimed by h with weight samples w_h on the grid nodes:
/// also returns c / w_h and throws InfeasibleError when it exceeds 1 in magnitude.
VelocitySign decompose_velocity_sign(const Amplitude& control, const QuadratureGrid& grid,
                                     std::span<const double> h_weight);

}  // namespace mobsense
