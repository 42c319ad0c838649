#include "mobsense/mcsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mobsense/errors.hpp"
#include "mobsense/kernels.hpp"

namespace mobsense {

PhaseModel make_phase_model(const FieldExpr& signal, std::span<const FieldExpr> noise, const ControlSchedule& control,
                            const Path& path, const QuadratureGrid& grid, double spectral_range, double bias,
                            const ParamMap& params) {
  if (!(spectral_range > 0.0)) throw RangeError("spectral range must be positive");
  PhaseModel m;
  m.signal_phase = phase_functional(signal, path, control, grid, params);
  for (const auto& g : noise) m.noise_phase.push_back(phase_functional(g, path, control, grid, params));
  m.spectral_range = spectral_range;
  m.bias = bias;
  return m;
}

namespace {

kernels::ShotSpec shot_spec(const PhaseModel& model, double omega, const NoiseModel& noise, std::uint64_t seed,
                            std::uint64_t stream) {
  if (noise.sigma.size() != model.noise_phase.size()) throw RangeError("one sigma per noise field is required");
  kernels::ShotSpec s;
  s.base_phase = model.spectral_range * omega * model.signal_phase + model.bias;
  for (std::size_t j = 0; j < model.noise_phase.size(); ++j) {
    if (!(noise.sigma[j] >= 0.0)) throw RangeError("noise sigma must be non-negative");
    s.noise_phase.push_back(model.spectral_range * model.noise_phase[j]);
  }
  s.sigma = noise.sigma;
  s.rng = CounterRng(seed, stream);
  return s;
}

void run_shots(const kernels::ShotSpec& spec, std::span<std::uint8_t> out, bool parallel) {
  if (parallel) {
    kernels::shot_outcomes_parallel(spec, 0, out);
  } else {
    kernels::shot_outcomes_serial(spec, 0, out);
  }
}

}  // namespace

ShotRecord simulate_shots(const PhaseModel& model, double omega, const NoiseModel& noise, std::uint64_t shots,
                          std::uint64_t seed, bool parallel) {
  if (shots < 1) throw RangeError("at least one shot is required");
  if (!(model.spectral_range > 0.0)) throw RangeError("spectral range must be positive");
  const auto spec = shot_spec(model, omega, noise, seed, 0);
  ShotRecord r;
  r.outcomes.resize(shots);
  run_shots(spec, r.outcomes, parallel);
  r.plus = std::accumulate(r.outcomes.begin(), r.outcomes.end(), std::uint64_t{0});
  return r;
}

double invert_frequency(double p_plus, const PhaseModel& model) {
  const double c = std::clamp(2.0 * p_plus - 1.0, -1.0, 1.0);
  return (std::acos(c) - model.bias) / (model.spectral_range * model.signal_phase);
}

double cramer_rao_bound(const PhaseModel& model, std::uint64_t shots) {
  const double slope = model.spectral_range * model.signal_phase;
  if (slope == 0.0) throw DomainError("signal phase is zero; the bound is infinite");
  return 1.0 / (static_cast<double>(shots) * slope * slope);
}

SimResult estimate_omega(std::span<const std::uint8_t> outcomes, const PhaseModel& model, int bootstrap,
                         std::uint64_t seed, bool parallel) {
  if (outcomes.empty()) throw RangeError("no outcomes to estimate from");
  if (model.signal_phase == 0.0) throw DomainError("signal phase is zero; omega is not identifiable");
  if (bootstrap < 2) throw RangeError("bootstrap needs at least two replicates");
  SimResult r;
  r.shots = outcomes.size();
  const std::uint64_t plus = std::accumulate(outcomes.begin(), outcomes.end(), std::uint64_t{0});
  r.p_plus = static_cast<double>(plus) / static_cast<double>(r.shots);
  if (plus == 0 || plus == r.shots) {
    throw NumericalError("saturated statistics: every shot gave the same outcome");
  }
  r.omega_hat = invert_frequency(r.p_plus, model);

  std::vector<std::uint64_t> counts(static_cast<std::size_t>(bootstrap));
  const CounterRng rng(seed, 1);
  if (parallel) {
    kernels::bootstrap_counts_parallel(outcomes, rng, counts);
  } else {
    kernels::bootstrap_counts_serial(outcomes, rng, counts);
  }
  double mean = 0.0, m2 = 0.0;
  for (std::size_t b = 0; b < counts.size(); ++b) {
    const double est = invert_frequency(static_cast<double>(counts[b]) / static_cast<double>(r.shots), model);
    const double d = est - mean;
    mean += d / static_cast<double>(b + 1);
    m2 += d * (est - mean);
  }
  r.variance = m2 / static_cast<double>(counts.size() - 1);
  r.crb = cramer_rao_bound(model, r.shots);
  r.ratio = r.variance / r.crb;
  return r;
}

TrialSummary run_trials(const PhaseModel& model, double omega, const NoiseModel& noise, std::uint64_t shots,
                        int trials, std::uint64_t seed, bool parallel) {
  if (trials < 1) throw RangeError("at least one trial is required");
  if (shots < 1) throw RangeError("at least one shot is required");
  if (model.signal_phase == 0.0) throw DomainError("signal phase is zero; omega is not identifiable");
  TrialSummary s;
  s.trials = trials;
  s.shots = shots;
  std::vector<std::uint8_t> out(shots);
  double sum = 0.0, sq = 0.0;
  int used = 0;
  for (int k = 0; k < trials; ++k) {
    const auto spec = shot_spec(model, omega, noise, seed, 2 + static_cast<std::uint64_t>(k));
    run_shots(spec, out, parallel);
    const std::uint64_t plus = std::accumulate(out.begin(), out.end(), std::uint64_t{0});
    if (plus == 0 || plus == shots) {
      ++s.saturated;
      continue;
    }
    const double est = invert_frequency(static_cast<double>(plus) / static_cast<double>(shots), model);
    sum += est;
    sq += (est - omega) * (est - omega);
    ++used;
  }
  if (used == 0) throw NumericalError("every trial saturated");
  s.mean = sum / used;
  s.mse = sq / used;
  s.crb = cramer_rao_bound(model, shots);
  s.ratio = s.mse / s.crb;
  return s;
}

double two_proportion_p_value(std::uint64_t plus_a, std::uint64_t n_a, std::uint64_t plus_b, std::uint64_t n_b) {
  const double pa = static_cast<double>(plus_a) / static_cast<double>(n_a);
  const double pb = static_cast<double>(plus_b) / static_cast<double>(n_b);
  const double pooled = static_cast<double>(plus_a + plus_b) / static_cast<double>(n_a + n_b);
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / static_cast<double>(n_a) + 1.0 / static_cast<double>(n_b)));
  if (se == 0.0) return pa == pb ? 1.0 : 0.0;
  const double z = std::abs(pa - pb) / se;
  return std::erfc(z / std::sqrt(2.0));
}

}  // namespace mobsense
