#pragma once

// Hot loops, each in a serial reference form and an OpenMP form. The two
// produce bitwise identical output for any thread count; the serial ones are
// kept for tests and the benchmark.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mobsense/fieldexpr.hpp"
#include "mobsense/hermitian.hpp"
#include "mobsense/rng.hpp"

namespace mobsense {

class Path;

namespace kernels {

// out[i] = f(gamma(times[i]), times[i]). On failure the error of the lowest
// failing index is rethrown.
void sample_field_serial(const FieldExpr& field, const Path& path, std::span<const double> times,
                         const ParamMap& params, std::span<double> out);
void sample_field_parallel(const FieldExpr& field, const Path& path, std::span<const double> times,
                           const ParamMap& params, std::span<double> out);

// out[i] = mu_max - mu_min of ops[i].
void spectral_gaps_serial(std::span<const HermitianOperator> ops, std::span<double> out);
void spectral_gaps_parallel(std::span<const HermitianOperator> ops, std::span<double> out);

/// Row-major dense tableau.
struct Tableau {
  std::vector<double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Gauss-Jordan pivot on (row, col) over every row of the tableau. Only the
// nonzero columns of the pivot row are touched.
void pivot_serial(Tableau& t, std::size_t row, std::size_t col);
void pivot_parallel(Tableau& t, std::size_t row, std::size_t col);

/// Per-shot Ramsey phase: base_phase + sum_j noise_phase[j] * sigma[j] * z_j.
struct ShotSpec {
  double base_phase = 0.0;
  std::vector<double> noise_phase;
  std::vector<double> sigma;
  CounterRng rng{0};

  // Counters consumed per shot: one uniform for the readout, then two per
  // pair of noise terms.
  std::uint64_t stride() const noexcept { return 1 + 2 * ((noise_phase.size() + 1) / 2); }
};

// out[k] = 1 when shot first_shot + k reads "+".
void shot_outcomes_serial(const ShotSpec& spec, std::uint64_t first_shot, std::span<std::uint8_t> out);
void shot_outcomes_parallel(const ShotSpec& spec, std::uint64_t first_shot, std::span<std::uint8_t> out);

// counts[b] = number of "+" in bootstrap replicate b (m draws with
// replacement from outcomes).
void bootstrap_counts_serial(std::span<const std::uint8_t> outcomes, const CounterRng& rng,
                             std::span<std::uint64_t> counts);
void bootstrap_counts_parallel(std::span<const std::uint8_t> outcomes, const CounterRng& rng,
                               std::span<std::uint64_t> counts);

}  // namespace kernels
}  // namespace mobsense
