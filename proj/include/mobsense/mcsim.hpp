#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mobsense/control.hpp"
#include "mobsense/fieldexpr.hpp"
#include "mobsense/trajectory.hpp"

namespace mobsense {

/// beta_j ~ N(0, sigma_j^2), drawn once per shot.
struct NoiseModel {
  std::vector<double> sigma;
};

/// Phase functionals of the signal and noise fields under one control.
struct PhaseModel {
  double signal_phase = 0.0;             // Phi_f
  std::vector<double> noise_phase;       // Phi_g_j
  double spectral_range = 2.0;           // Delta
  double bias = 0.0;                     // bias phase
};

PhaseModel make_phase_model(const FieldExpr& signal, std::span<const FieldExpr> noise, const ControlSchedule& control,
                            const Path& path, const QuadratureGrid& grid, double spectral_range, double bias,
                            const ParamMap& params = {});

struct ShotRecord {
  std::vector<std::uint8_t> outcomes;  // 1 = "+"
  std::uint64_t plus = 0;
};

/// m shots of phase Delta (omega Phi_f + sum beta_j Phi_g_j) + bias, read out
/// with p(+) = (1 + cos phi)/2. Shot k uses its own counter block of a
/// SplitMix64 counter generator keyed by `seed`.
ShotRecord simulate_shots(const PhaseModel& model, double omega, const NoiseModel& noise, std::uint64_t shots,
                          std::uint64_t seed, bool parallel = true);

struct SimResult {
  std::uint64_t shots = 0;
  double p_plus = 0.0;
  double omega_hat = 0.0;
  double variance = 0.0;  // bootstrap variance of omega_hat
  double crb = 0.0;       // 1 / (m Delta^2 Phi_f^2)
  double ratio = 0.0;     // variance / crb
};

/// Inverts p = (1 + cos(Delta omega Phi_f + bias))/2 on the acos branch.
/// Throws NumericalError when every shot agreed (p_hat is 0 or 1).
SimResult estimate_omega(std::span<const std::uint8_t> outcomes, const PhaseModel& model, int bootstrap = 200,
                         std::uint64_t seed = 0, bool parallel = true);

/// Inversion of a single observed frequency.
double invert_frequency(double p_plus, const PhaseModel& model);

/// Cramer-Rao bound 1 / (m Delta^2 Phi_f^2).
double cramer_rao_bound(const PhaseModel& model, std::uint64_t shots);

struct TrialSummary {
  int trials = 0;
  std::uint64_t shots = 0;
  double mean = 0.0;   // of omega_hat
  double mse = 0.0;    // about the true omega
  double crb = 0.0;
  double ratio = 0.0;  // mse / crb
  int saturated = 0;   // trials whose p_hat hit 0 or 1 (excluded)
};

/// Repeats simulate + estimate over independent experiments and reports the
/// mean squared error of omega_hat against omega.
TrialSummary run_trials(const PhaseModel& model, double omega, const NoiseModel& noise, std::uint64_t shots,
                        int trials, std::uint64_t seed, bool parallel = true);

/// Two-sided two-proportion z-test p-value.
double two_proportion_p_value(std::uint64_t plus_a, std::uint64_t n_a, std::uint64_t plus_b, std::uint64_t n_b);

}  // namespace mobsense
