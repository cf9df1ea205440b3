#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pwcc/analysis.hpp"
#include "pwcc/separable.hpp"

using namespace pwcc;
using std::numbers::pi;

TEST_CASE("one coordinate reduces to the univariate builder") {
  const Expr f = parse("sin(x1)", 1);
  const SeparableModel sep = build_separable({{f, LipschitzConstant(1.0)}}, Box({0.0}, {pi}), 0.01);
  const UnivariateModel uni = build_univariate(f, 0.0, pi, LipschitzConstant(1.0), 0.01);
  REQUIRE(sep.p.components().size() == 1);
  CHECK(sep.p.component(0) == uni.p);
  CHECK(sep.eps_split == std::vector<double>{0.01});
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, pi);
  for (int k = 0; k < 500; ++k) {
    const double x = u(rng);
    REQUIRE(eval_sumform(sep.p, std::vector<double>{x}) == eval_pwc(uni.p, x).value);
  }
}

TEST_CASE("sin(x1) + |x2| with eps 0.02 on a 300 x 300 grid") {
  const Box box({0.0, -1.0}, {pi, 1.0});
  const SeparableModel m = build_separable(
      {{parse("sin(x1)", 1), LipschitzConstant(1.0)}, {parse("abs(x1)", 1), LipschitzConstant(1.01)}},
      box, 0.02);
  CHECK(m.eps_split == std::vector<double>{0.01, 0.01});
  double worst = 0.0;
  for (int i = 0; i < 300; ++i) {
    for (int j = 0; j < 300; ++j) {
      const std::vector<double> x{pi * i / 299.0, -1.0 + 2.0 * j / 299.0};
      worst = std::max(worst, std::abs(std::sin(x[0]) + std::abs(x[1]) - eval_sumform(m.p, x)));
    }
  }
  CHECK(worst <= 0.02);
}

TEST_CASE("constant components add up") {
  const Box box({0.0, 0.0}, {1.0, 1.0});
  const SeparableModel m =
      build_separable({{parse("3", 1), LipschitzConstant(0.5)}, {parse("4", 1), LipschitzConstant(0.5)}},
                      box, 0.5);
  for (std::size_t j = 0; j < 2; ++j) {
    const UniGrid& g = m.grids[j];
    for (std::size_t i = 0; i < g.n_p; ++i) {
      std::vector<double> x{0.5, 0.5};
      x[j] = g.midpoint(i);
      // the other coordinate sits inside some subinterval, off its midpoint
      CHECK(eval_sumform(m.p, x) <= 7.0 + 1e-12);
    }
  }
  const std::vector<double> mids{m.grids[0].midpoint(0), m.grids[1].midpoint(0)};
  CHECK(std::abs(eval_sumform(m.p, mids) - 7.0) < 1e-12);
}

TEST_CASE("eps split: explicit budgets and argument checks") {
  const Box box({0.0, 0.0}, {1.0, 1.0});
  const std::vector<SeparableTerm> terms{{parse("x1", 1), LipschitzConstant(1.0)},
                                         {parse("x1", 1), LipschitzConstant(1.0)}};
  const SeparableModel m = build_separable(terms, box, 0.1, std::vector<double>{0.08, 0.02});
  CHECK(m.grids[0].n_p < m.grids[1].n_p);
  CHECK_THROWS_AS(build_separable(terms, box, 0.1, std::vector<double>{0.08, 0.08}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_separable(terms, box, 0.1, std::vector<double>{0.1}), std::invalid_argument);
  CHECK_THROWS_AS(build_separable(terms, box, 0.1, std::vector<double>{0.1, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_separable({terms[0]}, box, 0.1), std::invalid_argument);
}

TEST_CASE("expand_sumform: counts, guard and layout") {
  const Box box({0.0, 0.0}, {1.0, 1.0});
  const PwcFunction two_a({{{-1.0}, {0.0}, 0.0}, {{-2.0}, {1.0}, 0.5}}, Box({0.0}, {1.0}));
  const PwcFunction two_b({{{-3.0}, {0.5}, 1.0}, {{-4.0}, {2.0}, -1.0}}, Box({0.0}, {1.0}));
  const SumForm sf({two_a, two_b}, box);
  const PwcFunction full = expand_sumform(sf);
  REQUIRE(full.size() == 4);
  // the last coordinate varies fastest
  CHECK(full.piece(1).d == std::vector<double>{-1.0, -4.0});
  CHECK(full.piece(1).a == std::vector<double>{0.0, 2.0});
  CHECK(full.piece(1).b == -1.0);
  CHECK(full.piece(2).b == 1.5);

  CHECK_THROWS_AS(expand_sumform(sf, 3), GuardError);
  try {
    expand_sumform(sf, 3);
  } catch (const GuardError& e) {
    CHECK(std::string(e.what()).find('4') != std::string::npos);
  }
  CHECK_THROWS_AS(SumForm({two_a}, box), std::invalid_argument);
  CHECK_THROWS_AS(SumForm({two_a, PwcFunction({{{-1.0}, {0.0}, 0.0}}, Box({0.0}, {2.0}))}, box),
                  std::invalid_argument);
}

TEST_CASE("property: expanded max-form equals the sum form") {
  std::mt19937_64 rng(43);
  const Box box({-1.0, 0.0, 2.0}, {1.0, 2.0, 3.0});
  const SeparableModel m = build_separable({{parse("sin(3*x1)", 1), LipschitzConstant(3.0)},
                                            {parse("x1^2", 1), LipschitzConstant(4.0)},
                                            {parse("exp(-x1)", 1), LipschitzConstant(0.2)}},
                                           box, 0.9);
  const std::size_t total =
      m.p.component(0).size() * m.p.component(1).size() * m.p.component(2).size();
  const PwcFunction full = expand_sumform(m.p);
  CHECK(full.size() == total);
  for (const auto& x : random_points(box, 1000, 44)) {
    const double s = eval_sumform(m.p, x);
    REQUIRE(std::abs(eval_pwc(full, x).value - s) <= 1e-12 * std::max(1.0, std::abs(s)));
  }
}

TEST_CASE("property: per-coordinate winners combine into the expanded winner") {
  const Box box({0.0, 0.0}, {1.0, 1.0});
  const SeparableModel m = build_separable(
      {{parse("x1^3", 1), LipschitzConstant(3.0)}, {parse("cos(5*x1)", 1), LipschitzConstant(5.0)}},
      box, 0.5);
  const PwcFunction full = expand_sumform(m.p);
  const std::size_t n1 = m.p.component(1).size();
  for (const auto& x : random_points(box, 500, 45)) {
    const auto w = sumform_winners(m.p, x);
    const auto v = eval_pwc(full, x);
    const std::size_t flat = w[0] * n1 + w[1];
    CHECK(std::abs(eval_piece(full.piece(flat), x) - v.value) <= 1e-12);
  }
}
