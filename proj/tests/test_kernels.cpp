#include <doctest.h>

#include <random>

#include "mobsense/errors.hpp"
#include "mobsense/kernels.hpp"
#include "mobsense/trajectory.hpp"

using namespace mobsense;

TEST_SUITE("kernels") {
  TEST_CASE("field sampling") {
    const FieldExpr f = parse_field("exp(-x1^2)*cos(3*x2) + t*k");
    const Path p = Path::parametric({parse_field("sin(t)"), parse_field("t^2")}, 2.0);
    std::vector<double> times(5000), a(times.size()), b(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = 2.0 * static_cast<double>(i) / 4999.0;
    kernels::sample_field_serial(f, p, times, {{"k", 0.5}}, a);
    kernels::sample_field_parallel(f, p, times, {{"k", 0.5}}, b);
    CHECK(a == b);
  }

  TEST_CASE("errors surface from the lowest failing index") {
    const FieldExpr f = parse_field("1/(x1 - 0.5)");
    const Path p = Path::parametric({parse_field("t")}, 1.0);
    std::vector<double> times(1000), out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = static_cast<double>(i) / 999.0;
    times[700] = 0.5;
    times[300] = 0.5;
    CHECK_THROWS_AS(kernels::sample_field_parallel(f, p, times, {}, out), DomainError);
    CHECK_THROWS_AS(kernels::sample_field_serial(f, p, times, {}, out), DomainError);
  }

  TEST_CASE("pivots") {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    kernels::Tableau t;
    t.rows = 300;
    t.cols = 500;
    t.data.resize(t.rows * t.cols);
    for (auto& v : t.data) v = u(gen);
    for (std::size_t c = 0; c < t.cols; c += 3) t.at(17, c) = 0.0;
    auto a = t, b = t;
    kernels::pivot_serial(a, 17, 1);
    kernels::pivot_parallel(b, 17, 1);
    CHECK(a.data == b.data);
    CHECK(a.at(17, 1) == 1.0);
    for (std::size_t r = 0; r < a.rows; ++r)
      if (r != 17) CHECK(a.at(r, 1) == 0.0);
  }

  TEST_CASE("shot outcomes") {
    kernels::ShotSpec spec;
    spec.base_phase = 1.1;
    spec.noise_phase = {0.3, -0.2, 0.1};
    spec.sigma = {1.0, 0.0, 4.0};
    spec.rng = CounterRng(12);
    CHECK(spec.stride() == 5);
    std::vector<std::uint8_t> a(30000), b(30000), tail(10000);
    kernels::shot_outcomes_serial(spec, 0, a);
    kernels::shot_outcomes_parallel(spec, 0, b);
    CHECK(a == b);
    kernels::shot_outcomes_parallel(spec, 20000, tail);
    CHECK(std::equal(tail.begin(), tail.end(), a.begin() + 20000));
  }

  TEST_CASE("counter generator") {
    const CounterRng r(3);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; i += 2) {
      double z0, z1;
      r.gaussian_pair(static_cast<std::uint64_t>(i), z0, z1);
      sum += z0 + z1;
      sq += z0 * z0 + z1 * z1;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sq / n - 1.0) < 0.01);
    std::vector<int> hist(7, 0);
    for (int i = 0; i < 70000; ++i) ++hist[r.below(static_cast<std::uint64_t>(i), 7)];
    for (int h : hist) CHECK(std::abs(h - 10000) < 500);
    CHECK(CounterRng(3, 0).bits(5) != CounterRng(3, 1).bits(5));
  }
}
