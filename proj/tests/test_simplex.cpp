#include <doctest.h>

#include <random>

#include "mobsense/simplex.hpp"
#include "oracles.hpp"

using namespace mobsense;

namespace {

LinearProgram make(std::vector<double> c, Eigen::MatrixXd a, std::vector<double> b, std::vector<bool> free = {}) {
  return LinearProgram{std::move(c), std::move(a), std::move(b), std::move(free)};
}

}  // namespace

TEST_SUITE("simplex") {
  TEST_CASE("single equality") {
    Eigen::MatrixXd a(1, 1);
    a << 1.0;
    const auto r = lp_solve(make({1.0}, a, {3.0}));
    CHECK(r.status == LpStatus::Optimal);
    CHECK(r.value == doctest::Approx(3.0));
  }

  TEST_CASE("absolute value of a scalar") {
    Eigen::MatrixXd a(1, 2);
    a << 1.0, -1.0;
    const auto r = lp_solve(make({1.0, 1.0}, a, {2.0}));
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.value == doctest::Approx(2.0));
    CHECK(r.x[0] == doctest::Approx(2.0));
    CHECK(r.x[1] == doctest::Approx(0.0));
  }

  TEST_CASE("infeasible and unbounded") {
    Eigen::MatrixXd a(2, 1);
    a << 1.0, 1.0;
    CHECK(lp_solve(make({1.0}, a, {1.0, 2.0})).status == LpStatus::Infeasible);
    Eigen::MatrixXd neg(1, 1);
    neg << -1.0;
    CHECK(lp_solve(make({1.0}, neg, {1.0})).status == LpStatus::Infeasible);
    Eigen::MatrixXd u(1, 2);
    u << 1.0, -1.0;
    CHECK(lp_solve(make({-1.0, 0.0}, u, {1.0})).status == LpStatus::Unbounded);
  }

  TEST_CASE("free variables") {
    // min |x - 3| written as x - u + v = 3 with x free.
    Eigen::MatrixXd a(1, 3);
    a << 1.0, -1.0, 1.0;
    const auto r = lp_solve(make({0.0, 1.0, 1.0}, a, {3.0}, {true, false, false}));
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.value == doctest::Approx(0.0));
    CHECK(r.x[0] == doctest::Approx(3.0));
    Eigen::MatrixXd b(1, 1);
    b << 1.0;
    const auto neg = lp_solve(make({0.0}, b, {-4.0}, {true}));
    REQUIRE(neg.status == LpStatus::Optimal);
    CHECK(neg.x[0] == doctest::Approx(-4.0));
  }

  TEST_CASE("redundant rows") {
    Eigen::MatrixXd a(3, 3);
    a << 1, 1, 1, 2, 2, 2, 1, 0, 0;
    const auto r = lp_solve(make({1.0, 2.0, 3.0}, a, {1.0, 2.0, 0.25}));
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.value == doctest::Approx(0.25 + 2 * 0.75));
  }

  TEST_CASE("degenerate cycling example") {
    // Beale's example in equality form; cycles under naive Dantzig pricing.
    Eigen::MatrixXd a(3, 7);
    a << 0.25, -8, -1, 9, 1, 0, 0,
         0.5, -12, -0.5, 3, 0, 1, 0,
         0, 0, 1, 0, 0, 0, 1;
    const auto r = lp_solve(make({-0.75, 20, -0.5, 6, 0, 0, 0}, a, {0, 0, 1}));
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.value == doctest::Approx(-1.25));
  }

  TEST_CASE("random programs match vertex enumeration") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int solved = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const int m = 3, n = 6;
      Eigen::MatrixXd a(m, n);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = u(gen);
      // b from a non-negative point keeps the program feasible.
      Eigen::VectorXd x0(n);
      for (int j = 0; j < n; ++j) x0[j] = 0.5 * (u(gen) + 1.0);
      const Eigen::VectorXd b = a * x0;
      Eigen::VectorXd c(n);
      for (int j = 0; j < n; ++j) c[j] = u(gen) + 1.2;  // positive costs: bounded below
      const auto ref = oracle::vertex_enumeration(a, b, c);
      const auto r = lp_solve(make(std::vector<double>(c.data(), c.data() + n), a,
                                   std::vector<double>(b.data(), b.data() + m)));
      REQUIRE(ref.first);
      REQUIRE(r.status == LpStatus::Optimal);
      CHECK(std::abs(r.value - ref.second) <= 1e-9 * (1.0 + std::abs(ref.second)));
      Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(r.x.data(), n);
      CHECK((a * x - b).norm() <= 1e-9);
      CHECK(x.minCoeff() >= -1e-12);
      ++solved;
    }
    CHECK(solved == 200);
  }

  TEST_CASE("serial and parallel pivots agree") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int m = 60, n = 150;
    Eigen::MatrixXd a(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = u(gen);
    Eigen::VectorXd x0(n);
    for (int j = 0; j < n; ++j) x0[j] = 0.5 * (u(gen) + 1.0);
    const Eigen::VectorXd b = a * x0;
    std::vector<double> c(n);
    for (auto& v : c) v = u(gen) + 1.5;
    const auto lp = make(c, a, std::vector<double>(b.data(), b.data() + m));
    LpOptions serial;
    serial.parallel = false;
    const auto rs = lp_solve(lp, serial);
    const auto rp = lp_solve(lp);
    CHECK(rs.status == LpStatus::Optimal);
    CHECK(rs.value == rp.value);
    CHECK(rs.x == rp.x);
    CHECK(rs.iterations == rp.iterations);
  }
}
