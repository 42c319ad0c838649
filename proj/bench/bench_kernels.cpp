// Serial reference kernels against their OpenMP versions.
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "mobsense/kernels.hpp"
#include "mobsense/trajectory.hpp"

using namespace mobsense;

namespace {

const FieldExpr& field() {
  static const FieldExpr f = parse_field("exp(-x1^2) * cos(3*x2) + x1*x2*t");
  return f;
}

const Path& path() {
  static const Path p = Path::parametric({parse_field("sin(t)"), parse_field("t^2")}, 1.0);
  return p;
}

template <bool Parallel>
void BM_SampleField(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> times(n), out(n);
  for (std::size_t i = 0; i < n; ++i) times[i] = static_cast<double>(i) / static_cast<double>(n);
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::sample_field_parallel(field(), path(), times, {}, out);
    } else {
      kernels::sample_field_serial(field(), path(), times, {}, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

std::vector<HermitianOperator> random_operators(std::size_t n, int dim) {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> z;
  std::vector<HermitianOperator> ops;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<std::complex<double>> e(static_cast<std::size_t>(dim * dim));
    for (int i = 0; i < dim; ++i) {
      e[static_cast<std::size_t>(i * dim + i)] = z(gen);
      for (int j = i + 1; j < dim; ++j) {
        const std::complex<double> v(z(gen), z(gen));
        e[static_cast<std::size_t>(i * dim + j)] = v;
        e[static_cast<std::size_t>(j * dim + i)] = std::conj(v);
      }
    }
    ops.emplace_back(dim, std::move(e));
  }
  return ops;
}

template <bool Parallel>
void BM_SpectralGaps(benchmark::State& state) {
  const auto ops = random_operators(512, static_cast<int>(state.range(0)));
  std::vector<double> out(ops.size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::spectral_gaps_parallel(ops, out);
    } else {
      kernels::spectral_gaps_serial(ops, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_Pivot(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  kernels::Tableau base;
  base.rows = n;
  base.cols = 3 * n;
  base.data.resize(base.rows * base.cols);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& x : base.data) x = u(gen);
  for (auto _ : state) {
    state.PauseTiming();
    kernels::Tableau t = base;
    state.ResumeTiming();
    if constexpr (Parallel) {
      kernels::pivot_parallel(t, n / 2, n);
    } else {
      kernels::pivot_serial(t, n / 2, n);
    }
    benchmark::DoNotOptimize(t.data.data());
  }
}

template <bool Parallel>
void BM_Shots(benchmark::State& state) {
  kernels::ShotSpec spec;
  spec.base_phase = 0.7;
  spec.noise_phase = {0.1, -0.2, 0.05};
  spec.sigma = {1.0, 0.5, 2.0};
  spec.rng = CounterRng(11);
  std::vector<std::uint8_t> out(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::shot_outcomes_parallel(spec, 0, out);
    } else {
      kernels::shot_outcomes_serial(spec, 0, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_Bootstrap(benchmark::State& state) {
  std::vector<std::uint8_t> outcomes(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < outcomes.size(); ++i) outcomes[i] = static_cast<std::uint8_t>(i % 3 == 0);
  std::vector<std::uint64_t> counts(200);
  const CounterRng rng(5, 1);
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::bootstrap_counts_parallel(outcomes, rng, counts);
    } else {
      kernels::bootstrap_counts_serial(outcomes, rng, counts);
    }
    benchmark::DoNotOptimize(counts.data());
  }
}

}  // namespace

BENCHMARK(BM_SampleField<false>)->Arg(4096)->Arg(65536);
BENCHMARK(BM_SampleField<true>)->Arg(4096)->Arg(65536);
BENCHMARK(BM_SpectralGaps<false>)->Arg(2)->Arg(8);
BENCHMARK(BM_SpectralGaps<true>)->Arg(2)->Arg(8);
BENCHMARK(BM_Pivot<false>)->Arg(256)->Arg(1024);
BENCHMARK(BM_Pivot<true>)->Arg(256)->Arg(1024);
BENCHMARK(BM_Shots<false>)->Arg(100000);
BENCHMARK(BM_Shots<true>)->Arg(100000);
BENCHMARK(BM_Bootstrap<false>)->Arg(10000);
BENCHMARK(BM_Bootstrap<true>)->Arg(10000);

BENCHMARK_MAIN();
