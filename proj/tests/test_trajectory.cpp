#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "mobsense/errors.hpp"
#include "mobsense/quadrature.hpp"
#include "mobsense/trajectory.hpp"
#include "oracles.hpp"

using namespace mobsense;

namespace {

Path line(double T = 1.0) { return Path::parametric({parse_field("t")}, T); }

double weight_sum(const QuadratureGrid& g) { return std::accumulate(g.weights.begin(), g.weights.end(), 0.0); }

Reparametrization sampled(double T, int n, double (*h)(double, double)) {
  std::vector<double> t(static_cast<std::size_t>(n) + 1), v(t.size());
  for (int i = 0; i <= n; ++i) {
    t[static_cast<std::size_t>(i)] = T * i / n;
    v[static_cast<std::size_t>(i)] = h(t[static_cast<std::size_t>(i)], T);
  }
  t.back() = T;
  v.front() = 0.0;
  v.back() = T;
  return Reparametrization(t, v);
}

}  // namespace

TEST_SUITE("trajectory") {
  TEST_CASE("positions") {
    const Path p = Path::parametric({parse_field("v*t")}, 5.0, {{"v", 2.0}});
    CHECK(p.position_at(3.0) == Point{6.0});
    const Path w = Path::waypoints({0.0, 1.0}, {{0.0, 0.0}, {1.0, 1.0}});
    CHECK(w.position_at(0.5) == Point{0.5, 0.5});
    CHECK(w.dimension() == 2);
    CHECK_THROWS_AS(w.position_at(1.0 + 1e-9), RangeError);
    CHECK_THROWS_AS(w.position_at(-1e-9), RangeError);
    CHECK_THROWS_AS(Path::waypoints({0.0, 0.5, 0.5}, {{0.0}, {1.0}, {2.0}}), RangeError);
    CHECK_THROWS_AS(Path::waypoints({0.1, 1.0}, {{0.0}, {1.0}}), RangeError);
  }

  TEST_CASE("waypoint paths are continuous") {
    const Path w = Path::waypoints({0.0, 0.3, 1.0}, {{0.0}, {2.0}, {-1.0}});
    for (double t : {0.3, 0.0, 1.0}) {
      const double left = w.position_at(std::max(0.0, t - 1e-10))[0];
      const double right = w.position_at(std::min(1.0, t + 1e-10))[0];
      CHECK(std::abs(left - right) < 1e-8);
    }
  }

  TEST_CASE("quadrature rules") {
    const auto g = make_quadrature(1.0, 1, 2);
    REQUIRE(g.size() == 2);
    CHECK(g.nodes[0] == doctest::Approx(0.5 - 1.0 / (2 * std::sqrt(3.0))).epsilon(1e-15));
    CHECK(g.nodes[1] == doctest::Approx(0.5 + 1.0 / (2 * std::sqrt(3.0))).epsilon(1e-15));
    CHECK(g.weights[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g.weights[1] == doctest::Approx(0.5).epsilon(1e-15));

    const auto tr = make_quadrature(1.0, 2, 0, QuadratureRule::Trapezoid);
    REQUIRE(tr.size() == 3);
    CHECK(tr.weights == std::vector<double>{0.25, 0.5, 0.25});

    const auto g44 = make_quadrature(1.0, 4, 4);
    std::vector<double> t4;
    for (double t : g44.nodes) t4.push_back(std::pow(t, 4));
    CHECK(std::abs(g44.integrate(t4) - 0.2) <= 1e-12);
  }

  TEST_CASE("grid invariants") {
    for (double T : {0.5, 1.0, 3.7}) {
      for (int panels : {1, 3, 64}) {
        for (int q : {1, 2, 5, 8, 16}) {
          const auto g = make_quadrature(T, panels, q);
          CHECK(std::abs(weight_sum(g) - T) <= 1e-12 * T);
          for (std::size_t i = 1; i < g.size(); ++i) CHECK(g.nodes[i] > g.nodes[i - 1]);
          for (double w : g.weights) CHECK(w > 0.0);
        }
      }
      const auto d = default_grid(T);
      CHECK(static_cast<int>(d.panels()) == std::max(1, static_cast<int>(std::lround(64 * T))));
      CHECK(d.points_per_panel == 8);
    }
  }

  TEST_CASE("Gauss-Legendre rule is exact to degree 2n-1") {
    for (int n = 1; n <= 12; ++n) {
      std::vector<double> x, w;
      gauss_legendre_rule(n, x, w);
      for (int deg = 0; deg <= 2 * n - 1; ++deg) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += w[static_cast<std::size_t>(i)] * std::pow(x[static_cast<std::size_t>(i)], deg);
        const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
        CHECK(std::abs(s - exact) <= 1e-14);
      }
    }
  }

  TEST_CASE("refining a grid reduces the error for smooth integrands") {
    const FieldExpr f = parse_field("exp(sin(3*x1))");
    const Path p = line(2.0);
    const double fine = make_quadrature(2.0, 512, 8).integrate(sample_composite(f, p, make_quadrature(2.0, 512, 8)));
    double prev = std::numeric_limits<double>::infinity();
    for (int panels : {2, 4, 8, 16}) {
      const auto g = make_quadrature(2.0, panels, 2);
      const double err = std::abs(g.integrate(sample_composite(f, p, g)) - fine);
      CHECK(err < prev);
      prev = err;
    }
    const double oracle = oracle::trapezoid([](double t) { return std::exp(std::sin(3 * t)); }, 0.0, 2.0);
    CHECK(std::abs(fine - oracle) < 1e-9);
  }

  TEST_CASE("composite sampling") {
    const auto g = default_grid(1.0);
    const Path p = line();
    CHECK(std::abs(g.integrate(sample_composite(parse_field("x1"), p, g)) - 0.5) <= 1e-12);
    CHECK(std::abs(g.integrate(sample_composite(parse_field("x1^4"), p, g)) - 0.2) <= 1e-12);
    const auto g3 = default_grid(3.0);
    CHECK(std::abs(g3.integrate(sample_composite(parse_field("1"), line(3.0), g3)) - 3.0) <= 1e-12);
    CHECK_THROWS_AS(sample_composite(parse_field("x2"), p, g), RangeError);
  }

  TEST_CASE("identity reparametrization") {
    const auto g = default_grid(1.0);
    const auto s = apply_reparametrization(line(), Reparametrization::identity(1.0), g);
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
      CHECK(s.weight[i] == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(s.source_time[i] == doctest::Approx(s.grid.nodes[i]).epsilon(1e-12));
    }
  }

  TEST_CASE("quadratic reparametrization") {
    // h(t) = t^2 / T; the weight is the derivative of h^-1(tau) = sqrt(T tau).
    for (double T : {1.0, 2.0}) {
      const auto h = sampled(T, 400, [](double t, double T) { return t * t / T; });
      const auto s = apply_reparametrization(line(T), h, default_grid(T));
      CHECK(std::abs(s.grid.integrate(s.weight) - T) <= 1e-6 * T);
      for (std::size_t i = 0; i < s.grid.size(); i += 37) {
        const double tau = s.grid.nodes[i];
        if (tau > 0.05 * T) CHECK(s.weight[i] == doctest::Approx(std::sqrt(T / tau) / 2).epsilon(1e-4));
      }
    }
    CHECK_THROWS(Reparametrization({0.0, 0.5, 1.0}, {0.0, 0.7, 0.6}));
    CHECK_THROWS(Reparametrization({0.0, 0.5, 1.0}, {0.0, 0.5, 0.9}));
  }

  TEST_CASE("change of variables") {
    // Left form: integral of f(gamma(h(t))) dt. Right form: f(gamma(tau)) w(tau).
    const auto h = sampled(1.0, 400, [](double t, double) { return t * t; });
    const auto g = default_grid(1.0);
    const auto s = apply_reparametrization(line(), h, g);
    const FieldExpr f = parse_field("x1");
    const double left = g.integrate(sample_composite(f, s.path, g));
    CHECK(std::abs(left - 1.0 / 3.0) <= 1e-6);
    CHECK(std::abs(reparametrized_phase(f, line(), s) - left) <= 1e-8);

    auto smooth = sampled(2.0, 200, [](double t, double T) { return T * (1 - std::cos(std::numbers::pi * t / T)) / 2; });
    const Path curve = Path::parametric({parse_field("cos(t)"), parse_field("t^2/2")}, 2.0);
    const auto g2 = default_grid(2.0);
    const auto s2 = apply_reparametrization(curve, smooth, g2);
    for (const char* src : {"x1*x2", "exp(-x2)+x1^3", "sin(3*x1 - x2)"}) {
      const FieldExpr field = parse_field(src);
      const double lhs = g2.integrate(sample_composite(field, s2.path, g2));
      const double rhs = reparametrized_phase(field, curve, s2);
      CHECK_MESSAGE(std::abs(lhs - rhs) <= 1e-6 * (1 + std::abs(lhs)), src);
    }
  }

  TEST_CASE("independent path design") {
    const Box unit{{{0.0, 1.0}}};
    const std::vector<FieldExpr> two = {parse_field("1"), parse_field("x1")};
    const auto d2 = design_independent_path(two, unit, 1.0, 1, 100);
    CHECK(d2.condition_number < 1e8);
    CHECK(d2.points.size() == 2);

    std::vector<FieldExpr> mono;
    for (const char* s : {"1", "x1", "x1^2", "x1^3", "x1^4"}) mono.push_back(parse_field(s));
    const auto d5 = design_independent_path(mono, unit, 1.0, 2, 1000);
    CHECK(std::isfinite(d5.condition_number));
    for (std::size_t i = 1; i < d5.times.size(); ++i) CHECK(d5.times[i] > d5.times[i - 1]);

    const std::vector<FieldExpr> dependent = {parse_field("x1"), parse_field("2*x1")};
    CHECK_THROWS_AS(design_independent_path(dependent, unit, 1.0, 3, 50), NumericalError);
  }

  TEST_CASE("designed paths give full-rank composed samples") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<std::pair<int, int>> freqs;
      for (int a = 1; a <= 4; ++a)
        for (int b = 0; b <= 2; ++b) freqs.emplace_back(a, b);
      std::shuffle(freqs.begin(), freqs.end(), gen);
      std::vector<FieldExpr> fields;
      for (int j = 0; j < 4; ++j) {
        const auto [a, b] = freqs[static_cast<std::size_t>(j)];
        fields.push_back(parse_field("cos(" + std::to_string(a) + "*x1 + " + std::to_string(b) + "*x2)"));
      }
      const auto d = design_independent_path(fields, Box{{{-1.0, 1.0}, {-1.0, 1.0}}}, 1.0, gen(), 2000);
      const auto g = default_grid(1.0);
      Eigen::MatrixXd m(static_cast<Eigen::Index>(g.size()), 4);
      for (int j = 0; j < 4; ++j) {
        const auto col = sample_composite(fields[static_cast<std::size_t>(j)], d.path, g);
        for (std::size_t i = 0; i < col.size(); ++i) m(static_cast<Eigen::Index>(i), j) = col[i] * std::sqrt(g.weights[i]);
      }
      const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(m.transpose() * m).singularValues();
      CHECK(sv[3] > 1e-10 * sv[0]);
    }
  }
}
