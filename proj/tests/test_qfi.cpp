#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "mobsense/errors.hpp"
#include "mobsense/hermitian.hpp"
#include "mobsense/kernels.hpp"
#include "mobsense/qfi.hpp"

using namespace mobsense;
using Complex = std::complex<double>;

namespace {

HermitianOperator random_hermitian(std::mt19937_64& gen, int dim) {
  std::normal_distribution<double> z;
  std::vector<Complex> e(static_cast<std::size_t>(dim * dim));
  for (int i = 0; i < dim; ++i) {
    e[static_cast<std::size_t>(i * dim + i)] = z(gen);
    for (int j = i + 1; j < dim; ++j) {
      const Complex v(z(gen), z(gen));
      e[static_cast<std::size_t>(i * dim + j)] = v;
      e[static_cast<std::size_t>(j * dim + i)] = std::conj(v);
    }
  }
  return HermitianOperator(dim, e);
}

ExprOperator rotating_field() {
  return ExprOperator::pauli(FieldExpr(), parse_field("B*cos(k*x1)"), parse_field("B*sin(k*x1)"), FieldExpr());
}

}  // namespace

TEST_SUITE("qfi") {
  TEST_CASE("extreme eigenvalues") {
    auto z = eigen_range(HermitianOperator::pauli_z());
    CHECK(z.min == -1.0);
    CHECK(z.max == 1.0);
    // v t B [sin(k v t) X - cos(k v t) Y] at v = 1, t = 2, B = 3.
    const double v = 1, t = 2, B = 3, k = 0.37;
    const auto h = HermitianOperator::from_pauli(0.0, v * t * B * std::sin(k * v * t), -v * t * B * std::cos(k * v * t), 0.0);
    const auto r = eigen_range(h);
    CHECK(r.min == doctest::Approx(-6.0).epsilon(1e-14));
    CHECK(r.max == doctest::Approx(6.0).epsilon(1e-14));
    const auto d = eigen_range(HermitianOperator::diagonal({1.0, 2.0, 5.0}));
    CHECK(d.min == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d.max == doctest::Approx(5.0).epsilon(1e-14));
    CHECK_THROWS_AS(HermitianOperator(2, {1.0, Complex(0, 1), Complex(0, 1), 1.0}), DomainError);
  }

  TEST_CASE("Jacobi matches a library eigensolver") {
    std::mt19937_64 gen(4);
    for (int dim = 1; dim <= 10; ++dim) {
      for (int trial = 0; trial < 10; ++trial) {
        const auto h = random_hermitian(gen, dim);
        Eigen::MatrixXcd m(dim, dim);
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j) m(i, j) = h(i, j);
        const Eigen::VectorXd ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(m).eigenvalues();
        const auto ours = jacobi_eigenvalues(h);
        REQUIRE(ours.size() == static_cast<std::size_t>(dim));
        for (int i = 0; i < dim; ++i) CHECK(std::abs(ours[static_cast<std::size_t>(i)] - ref[i]) <= 1e-10 * (1 + ref.cwiseAbs().maxCoeff()));
        const auto r = eigen_range(h);
        CHECK(std::abs(r.min - ref[0]) <= 1e-10 * (1 + std::abs(ref[0])));
        CHECK(std::abs(r.max - ref[dim - 1]) <= 1e-10 * (1 + std::abs(ref[dim - 1])));
      }
    }
  }

  TEST_CASE("operator bounds") {
    const auto g = default_grid(2.0);
    const Path path = Path::parametric({parse_field("v*t")}, 2.0, {{"v", 1.0}});
    const ParamMap p{{"B", 1.0}, {"k", 0.8}};
    const auto r = qfi_bound(sample_operator(rotating_field().diff("k"), path, g, p), g);
    CHECK(r.bound == doctest::Approx(16.0).epsilon(1e-12));
    CHECK(r.method == "analytic-2x2");
    CHECK(r.gap_samples.size() == g.size());

    const double T = 1.7;
    const auto gT = default_grid(T);
    const auto sz = qfi_bound([](double) { return HermitianOperator::pauli_z(); }, gT);
    CHECK(sz.bound == doctest::Approx(4 * T * T).epsilon(1e-13));
    CHECK(qfi_bound([](double) { return HermitianOperator::zero(3); }, gT).bound == 0.0);
    const auto big = qfi_bound([](double t) { return HermitianOperator::diagonal({0.0, t, -t}); }, gT);
    CHECK(big.method == "jacobi");
    CHECK(big.bound == doctest::Approx(T * T * T * T).epsilon(1e-12));
  }

  TEST_CASE("closed forms") {
    CHECK(qfi_spatial_frequency(1, 1, 2) == 16.0);
    CHECK(qfi_spatial_frequency(1, 0, 2) == 0.0);
    CHECK(qfi_spatial_frequency(2, 3, 1) == 36.0);
    CHECK(qfi_fast_relocation(1, 1, 1) == 4.0);
    CHECK(qfi_fast_relocation(1, 1, 0) == 0.0);
    CHECK(qfi_fast_relocation(1, 2, 3) == 144.0);
    CHECK(qfi_uniform_acceleration(1.3, 0.7, 0.0, 1.9) == qfi_spatial_frequency(1.3, 0.7, 1.9));

    const double T = 1.4, B = 0.8, v0 = 0.5;
    const auto g = default_grid(T);
    std::vector<double> vel(g.size(), v0), zero(g.size(), 0.0), acc(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) acc[i] = v0 + 2.0 * g.nodes[i];
    CHECK(qfi_velocity_schedule(vel, B, g) == doctest::Approx(qfi_spatial_frequency(B, v0, T)).epsilon(1e-13));
    CHECK(qfi_velocity_schedule(zero, B, g) == 0.0);
    CHECK(qfi_velocity_schedule(acc, B, g) == doctest::Approx(qfi_uniform_acceleration(B, v0, 2.0, T)).epsilon(1e-12));
  }

  TEST_CASE("general moving sensor") {
    const auto g = default_grid(1.0);
    const Path line = Path::parametric({parse_field("t")}, 1.0);
    CHECK(qfi_moving_general(parse_field("1"), line, 2.0, g) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(qfi_moving_general(parse_field("x1"), line, 2.0, g) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(qfi_moving_general(parse_field("cos(k*x1)"), line, 2.0, g, {{"k", 0.0}}, "k") == 0.0);
    // With k = 1: (2 * integral of -t sin t)^2.
    const double I = std::sin(1.0) - std::cos(1.0);
    CHECK(qfi_moving_general(parse_field("cos(k*x1)"), line, 2.0, g, {{"k", 1.0}}, "k") ==
          doctest::Approx(4 * I * I).epsilon(1e-12));
  }

  TEST_CASE("chain rule through a parameter-dependent path") {
    // Start point depends on k: x(t) = k + v t.
    const double B = 1.3, v = 0.9, k = 0.6, T = 1.5;
    const auto g = default_grid(T);
    const ParamMap p{{"B", B}, {"v", v}, {"k", k}};
    const Path clock = Path::parametric({parse_field("t")}, T);
    const ExprOperator assembled =
        ExprOperator::pauli(FieldExpr(), parse_field("B*cos(k*(k + v*x1))"), parse_field("B*sin(k*(k + v*x1))"), FieldExpr());
    const double whole = qfi_bound(sample_operator(assembled.diff("k"), clock, g, p), g).bound;

    const Path moving = Path::parametric({parse_field("k + v*t")}, T, p);
    const auto explicit_part = sample_operator(rotating_field().diff("k"), moving, g, p);
    const ExprOperator dx =
        ExprOperator::pauli(FieldExpr(), parse_field("-B*k*sin(k*x1)"), parse_field("B*k*cos(k*x1)"), FieldExpr());
    const auto path_part = sample_operator(dx, moving, g, p);
    std::vector<HermitianOperator> sum;
    for (std::size_t i = 0; i < g.size(); ++i) sum.push_back(explicit_part[i] + path_part[i] * 1.0);
    const double pieces = qfi_bound(sum, g).bound;
    CHECK(std::abs(whole - pieces) <= 1e-9 * whole);
    // Gap 2 B (x + k) with x = k + v t.
    const double exact = std::pow(B * (4 * k * T + v * T * T), 2);
    CHECK(whole == doctest::Approx(exact).epsilon(1e-12));
  }

  TEST_CASE("serial and parallel gaps agree") {
    std::mt19937_64 gen(6);
    std::vector<HermitianOperator> ops;
    for (int i = 0; i < 700; ++i) ops.push_back(random_hermitian(gen, 1 + i % 6));
    std::vector<double> a(ops.size()), b(ops.size());
    kernels::spectral_gaps_serial(ops, a);
    kernels::spectral_gaps_parallel(ops, b);
    CHECK(a == b);
  }
}
