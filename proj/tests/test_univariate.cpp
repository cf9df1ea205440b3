#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pwcc/univariate.hpp"

using namespace pwcc;
using std::numbers::pi;

TEST_CASE("build_grid examples") {
  const UniGrid one = build_grid(0.0, 1.0, 2.5, LipschitzConstant(1.0));
  CHECK(one.n_p == 1);
  CHECK(one.delta == 1.0);

  const UniGrid five = build_grid(0.0, 1.0, 0.6, LipschitzConstant(1.0));
  CHECK(five.n_p == 5);  // ceil(1 / 0.24) = ceil(4.1667)
  CHECK(five.delta == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(std::abs(5 * five.delta - 1.0) < 1e-12);

  const UniGrid sine = build_grid(0.0, pi, 0.01, LipschitzConstant(1.0));
  CHECK(sine.n_p == 786);  // ceil(pi / 0.004)
  CHECK(sine.delta <= 0.004);
}

TEST_CASE("build_grid guards and argument checks") {
  CHECK_THROWS_AS(build_grid(0.0, 1000.0, 1e-12, LipschitzConstant(1.0)), GuardError);
  CHECK_THROWS_AS(build_grid(1.0, 0.0, 0.1, LipschitzConstant(1.0)), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(0.0, 1.0, 0.0, LipschitzConstant(1.0)), std::invalid_argument);
  CHECK_THROWS_AS(LipschitzConstant(0.0), std::invalid_argument);
  CHECK_THROWS_AS(LipschitzConstant(-1.0), std::invalid_argument);
}

TEST_CASE("property: grid nodes reproduce both endpoints") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> lo(-50.0, 50.0);
  std::uniform_real_distribution<double> width(0.01, 20.0);
  std::uniform_real_distribution<double> eps(1e-3, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = lo(rng);
    const double b = a + width(rng);
    const UniGrid g = build_grid(a, b, eps(rng), LipschitzConstant(1.3));
    CHECK(g.node(0) == a);
    CHECK(g.node(g.n_p) == b);
    CHECK(std::abs(static_cast<double>(g.n_p) * g.delta - (b - a)) <= 1e-12 * (b - a));
  }
}

TEST_CASE("build_piece matches the linear-system oracle on the unit example") {
  const Expr f = parse("x1^2 + 1", 1);
  const UniGrid g{0.0, 1.0, 1.0, 1};
  const DiagQuadPiece p = build_piece(f, g, 0, LipschitzConstant(1.0));
  const double v = f(0.5);
  const auto beta = oracle::parabola_by_solve(0.0, 1.0, 1.0, v);
  CHECK(p.d[0] == doctest::Approx(beta[0]));
  CHECK(p.a[0] == doctest::Approx(beta[1]));
  CHECK(p.b == doctest::Approx(beta[2]));
  CHECK(p.d[0] == -2.0);
  CHECK(p.a[0] == 2.0);
  CHECK(p.b == v - 0.5);
}

TEST_CASE("build_piece for a constant target") {
  const double c = 2.75;
  const Expr f = parse("2.75", 1);
  const UniGrid g = build_grid(-1.0, 3.0, 0.2, LipschitzConstant(0.8));
  for (std::size_t i = 0; i < g.n_p; ++i) {
    const DiagQuadPiece p = build_piece(f, g, i, LipschitzConstant(0.8));
    const double left = g.node(i);
    const double right = left + g.delta;
    CHECK(std::abs(eval_piece(p, std::vector<double>{g.midpoint(i)}) - c) < 1e-12);
    CHECK(std::abs(eval_piece(p, std::vector<double>{left}) - (c - 0.5 * 0.8 * g.delta)) < 1e-12);
    CHECK(std::abs(eval_piece(p, std::vector<double>{right}) - (c - 0.5 * 0.8 * g.delta)) < 1e-12);
  }
}

TEST_CASE("property: the three fitting conditions hold") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> left(-10.0, 10.0);
  std::uniform_real_distribution<double> dx(1e-2, 2.0);
  std::uniform_real_distribution<double> kappa(0.1, 5.0);
  std::uniform_real_distribution<double> value(-5.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double l = left(rng), w = dx(rng), k = kappa(rng), v = value(rng);
    const DiagQuadPiece p = parabola_coefficients(l, l + w, k, v);
    auto slope = [&](double x) { return 2.0 * p.d[0] * x + p.a[0]; };
    CHECK(p.d[0] < 0.0);
    CHECK(p.d[0] == doctest::Approx(-2.0 * k / w));
    CHECK(std::abs(eval_piece(p, std::vector<double>{l + 0.5 * w}) - v) < 1e-9);
    CHECK(std::abs(slope(l) - 2.0 * k) < 1e-9 * std::max(1.0, std::abs(l) * k / w));
    CHECK(std::abs(slope(l + w) + 2.0 * k) < 1e-9 * std::max(1.0, std::abs(l) * k / w));
  }
}

TEST_CASE("property: closed form agrees with the 3x3 solve") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> left(-5.0, 5.0);
  std::uniform_real_distribution<double> dx(1e-2, 2.0);
  std::uniform_real_distribution<double> kappa(0.1, 5.0);
  std::uniform_real_distribution<double> value(-3.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double l = left(rng), w = dx(rng), k = kappa(rng), v = value(rng);
    const DiagQuadPiece p = parabola_coefficients(l, l + w, k, v);
    const auto beta = oracle::parabola_by_solve(l, w, k, v);
    const double got[3] = {p.d[0], p.a[0], p.b};
    for (int c = 0; c < 3; ++c) {
      CHECK(std::abs(got[c] - beta[c]) <= 1e-9 * std::max(1.0, std::abs(beta[c])));
    }
  }
}

TEST_CASE("build_univariate: constant target") {
  const Expr f = parse("3", 1);
  const UnivariateModel m = build_univariate(f, 0.0, 1.0, LipschitzConstant(1.0), 0.5);
  REQUIRE(m.p.size() == m.grid.n_p);
  for (std::size_t i = 0; i < m.grid.n_p; ++i) {
    CHECK(m.p.piece(i).d[0] == m.p.piece(0).d[0]);
    // translated copies of the first piece
    for (double t : {-0.3, 0.0, 0.1}) {
      const double xi = m.grid.midpoint(i) + t * m.grid.delta;
      const double x0 = m.grid.midpoint(0) + t * m.grid.delta;
      CHECK(std::abs(eval_piece(m.p.piece(i), std::vector<double>{xi}) -
                     eval_piece(m.p.piece(0), std::vector<double>{x0})) < 1e-12);
    }
    CHECK(std::abs(eval_pwc(m.p, m.grid.midpoint(i)).value - 3.0) < 1e-9);
  }
  const double err = oracle::dense_max_diff(
      [&](double x) { return f(x); }, [&](double x) { return eval_pwc(m.p, x).value; }, 0.0, 1.0,
      10001);
  CHECK(err <= 0.5);
}

TEST_CASE("build_univariate: sin on [0, pi] with eps 0.01") {
  const Expr f = parse("sin(x1)", 1);
  const UnivariateModel m = build_univariate(f, 0.0, pi, LipschitzConstant(1.0), 0.01);
  CHECK(m.p.size() == 786);
  const double err = oracle::dense_max_diff(
      [](double x) { return std::sin(x); }, [&](double x) { return eval_pwc(m.p, x).value; }, 0.0,
      pi, 100'000);
  CHECK(err <= 0.01);
  for (std::size_t i = 0; i < m.grid.n_p; ++i) {
    REQUIRE(std::abs(eval_pwc(m.p, m.grid.midpoint(i)).value - std::sin(m.grid.midpoint(i))) <= 1e-9);
  }
}

TEST_CASE("build_univariate: |x| including the kink") {
  const Expr f = parse("abs(x1)", 1);
  const UnivariateModel m = build_univariate(f, -1.0, 1.0, LipschitzConstant(1.01), 0.1);
  const double err = oracle::dense_max_diff(
      [](double x) { return std::abs(x); }, [&](double x) { return eval_pwc(m.p, x).value; }, -1.0,
      1.0, 100'001);
  CHECK(err <= 0.1);
  CHECK(std::abs(eval_pwc(m.p, 0.0).value) <= 0.1);
  CHECK_THROWS_AS(build_univariate(parse("x1*x2", 2), 0, 1, LipschitzConstant(1), 0.1),
                  std::invalid_argument);
}
