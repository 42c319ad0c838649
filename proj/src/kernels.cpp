#include "mobsense/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "mobsense/errors.hpp"
#include "mobsense/trajectory.hpp"

namespace mobsense::kernels {

namespace {

double sample_one(const FieldExpr& field, const Path& path, double t, const ParamMap& params,
                  std::vector<double>& point) {
  path.position_at(t, point);
  return field.eval(point, t, params);
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw RangeError("kernel output size mismatch");
}

}  // namespace

void sample_field_serial(const FieldExpr& field, const Path& path, std::span<const double> times,
                         const ParamMap& params, std::span<double> out) {
  check_sizes(times.size(), out.size());
  std::vector<double> point(static_cast<std::size_t>(std::max(path.dimension(), 1)));
  for (std::size_t i = 0; i < times.size(); ++i) out[i] = sample_one(field, path, times[i], params, point);
}

void sample_field_parallel(const FieldExpr& field, const Path& path, std::span<const double> times,
                           const ParamMap& params, std::span<double> out) {
  check_sizes(times.size(), out.size());
  const auto n = static_cast<std::ptrdiff_t>(times.size());
  std::ptrdiff_t failed_at = std::numeric_limits<std::ptrdiff_t>::max();
  std::exception_ptr failure;
#pragma omp parallel if (n > 256)
  {
    std::vector<double> point(static_cast<std::size_t>(std::max(path.dimension(), 1)));
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        out[static_cast<std::size_t>(i)] =
            sample_one(field, path, times[static_cast<std::size_t>(i)], params, point);
      } catch (...) {
#pragma omp critical(mobsense_sample_failure)
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void spectral_gaps_serial(std::span<const HermitianOperator> ops, std::span<double> out) {
  check_sizes(ops.size(), out.size());
  for (std::size_t i = 0; i < ops.size(); ++i) out[i] = eigen_range(ops[i]).gap();
}

void spectral_gaps_parallel(std::span<const HermitianOperator> ops, std::span<double> out) {
  check_sizes(ops.size(), out.size());
  const auto n = static_cast<std::ptrdiff_t>(ops.size());
#pragma omp parallel for schedule(dynamic, 16) if (n > 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = eigen_range(ops[static_cast<std::size_t>(i)]).gap();
  }
}

namespace {

// Scales the pivot row and returns its nonzero columns.
std::vector<std::size_t> prepare_pivot_row(Tableau& t, std::size_t row, std::size_t col) {
  double* pr = &t.data[row * t.cols];
  const double inv = 1.0 / pr[col];
  std::vector<std::size_t> nz;
  nz.reserve(64);
  for (std::size_t j = 0; j < t.cols; ++j) {
    if (pr[j] != 0.0) {
      pr[j] *= inv;
      nz.push_back(j);
    }
  }
  pr[col] = 1.0;
  return nz;
}

inline void eliminate_row(Tableau& t, std::size_t i, std::size_t row, std::size_t col,
                          const std::vector<std::size_t>& nz) {
  double* ri = &t.data[i * t.cols];
  const double factor = ri[col];
  if (factor == 0.0) return;
  const double* pr = &t.data[row * t.cols];
  for (std::size_t j : nz) ri[j] -= factor * pr[j];
  ri[col] = 0.0;
}

}  // namespace

void pivot_serial(Tableau& t, std::size_t row, std::size_t col) {
  const auto nz = prepare_pivot_row(t, row, col);
  for (std::size_t i = 0; i < t.rows; ++i) {
    if (i != row) eliminate_row(t, i, row, col, nz);
  }
}

void pivot_parallel(Tableau& t, std::size_t row, std::size_t col) {
  const auto nz = prepare_pivot_row(t, row, col);
  const auto rows = static_cast<std::ptrdiff_t>(t.rows);
  const bool big = t.rows * nz.size() > 32768;
#pragma omp parallel for schedule(static) if (big)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    if (static_cast<std::size_t>(i) != row) eliminate_row(t, static_cast<std::size_t>(i), row, col, nz);
  }
}

namespace {

inline std::uint8_t one_shot(const ShotSpec& s, std::uint64_t shot) {
  const std::uint64_t base = shot * s.stride();
  double phase = s.base_phase;
  const std::size_t n = s.noise_phase.size();
  for (std::size_t j = 0; j < n; j += 2) {
    const double a0 = s.noise_phase[j] * s.sigma[j];
    const double a1 = j + 1 < n ? s.noise_phase[j + 1] * s.sigma[j + 1] : 0.0;
    if (a0 == 0.0 && a1 == 0.0) continue;
    double z0, z1;
    s.rng.gaussian_pair(base + 1 + j, z0, z1);
    phase += a0 * z0 + a1 * z1;
  }
  const double p_plus = 0.5 * (1.0 + std::cos(phase));
  return s.rng.uniform(base) < p_plus ? 1 : 0;
}

void check_shot_spec(const ShotSpec& s) {
  if (s.sigma.size() != s.noise_phase.size()) throw RangeError("noise sigma count mismatch");
}

}  // namespace

void shot_outcomes_serial(const ShotSpec& spec, std::uint64_t first_shot, std::span<std::uint8_t> out) {
  check_shot_spec(spec);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = one_shot(spec, first_shot + k);
}

void shot_outcomes_parallel(const ShotSpec& spec, std::uint64_t first_shot, std::span<std::uint8_t> out) {
  check_shot_spec(spec);
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if (n > 4096)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    out[static_cast<std::size_t>(k)] = one_shot(spec, first_shot + static_cast<std::uint64_t>(k));
  }
}

namespace {

std::uint64_t one_replicate(std::span<const std::uint8_t> outcomes, const CounterRng& rng, std::uint64_t b) {
  const std::uint64_t m = outcomes.size();
  std::uint64_t plus = 0;
  for (std::uint64_t k = 0; k < m; ++k) plus += outcomes[rng.below(b * m + k, m)];
  return plus;
}

}  // namespace

void bootstrap_counts_serial(std::span<const std::uint8_t> outcomes, const CounterRng& rng,
                             std::span<std::uint64_t> counts) {
  for (std::size_t b = 0; b < counts.size(); ++b) counts[b] = one_replicate(outcomes, rng, b);
}

void bootstrap_counts_parallel(std::span<const std::uint8_t> outcomes, const CounterRng& rng,
                               std::span<std::uint64_t> counts) {
  const auto reps = static_cast<std::ptrdiff_t>(counts.size());
#pragma omp parallel for schedule(dynamic, 1) if (reps > 1)
  for (std::ptrdiff_t b = 0; b < reps; ++b) {
    counts[static_cast<std::size_t>(b)] = one_replicate(outcomes, rng, static_cast<std::uint64_t>(b));
  }
}

}  // namespace mobsense::kernels
