#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pwcc/analysis.hpp"
#include "pwcc/dc.hpp"

using namespace pwcc;

TEST_CASE("min_eigenvalue examples") {
  CHECK(min_eigenvalue(std::vector<double>{1, 0, 0, 0, 1, 0, 0, 0, 1}, 3) == doctest::Approx(1.0));
  CHECK(min_eigenvalue(std::vector<double>{2, 0, 0, -5}, 2) == doctest::Approx(-5.0));
  CHECK(min_eigenvalue(std::vector<double>{0, 1, 1, 0}, 2) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(min_eigenvalue(std::vector<double>{0, 1, 2, 0}, 2), std::invalid_argument);
  CHECK_THROWS_AS(min_eigenvalue(std::vector<double>{0, 1, 2}, 2), std::invalid_argument);
}

TEST_CASE("property: Jacobi eigenvalues agree with Eigen's self-adjoint solver") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int n : {1, 2, 3, 5, 8, 20}) {
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::MatrixXd m(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = u(rng);
      }
      std::vector<double> flat(static_cast<std::size_t>(n * n));
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) flat[static_cast<std::size_t>(i * n + j)] = m(i, j);
      }
      const auto ours = symmetric_eigenvalues(flat, static_cast<std::size_t>(n));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(m);
      for (int k = 0; k < n; ++k) {
        CHECK(ours[static_cast<std::size_t>(k)] == doctest::Approx(ref.eigenvalues()(k)).epsilon(1e-10).scale(1.0));
      }
    }
  }
}

TEST_CASE("estimate_mu examples") {
  const MuEstimate convex = estimate_mu(parse("x1^2", 1), Box({0.0}, {1.0}), 11, 1.1);
  CHECK(convex.mu == 0.0);
  CHECK(convex.min_hessian_eigenvalue == doctest::Approx(2.0).epsilon(1e-3));

  const MuEstimate concave = estimate_mu(parse("-x1^2", 1), Box({-1.0}, {1.0}), 11, 1.0);
  CHECK(std::abs(concave.mu - 1.0) < 1e-3);

  const MuEstimate sine =
      estimate_mu(parse("sin(x1)", 1), Box({0.0}, {std::numbers::pi}), 11, 1.0);
  CHECK(std::abs(sine.mu - 0.5) < 1e-3);
  CHECK(std::abs(sine.argmin[0] - std::numbers::pi / 2) < 1e-12);

  CHECK_THROWS_AS(estimate_mu(parse("x1", 1), Box({0.0}, {1.0}), 11, 0.5), std::invalid_argument);
}

TEST_CASE("estimate_mu on a 2-D saddle") {
  // Hessian diag(2, -6) everywhere: shift must be 3
  const MuEstimate est = estimate_mu(parse("x1^2 - 3*x2^2", 2), Box({-1.0, -1.0}, {1.0, 1.0}), 5, 1.0);
  CHECK(std::abs(est.mu - 3.0) < 1e-3);
  CHECK(est.samples == 25 + 16);
}

TEST_CASE("build_tangent_planes examples") {
  const Box square({-1.0, -1.0}, {1.0, 1.0});
  for (const auto& plane : build_tangent_planes(parse("-(x1^2+x2^2)", 2), 1.0, square, 4)) {
    CHECK(std::abs(plane.a[0]) < 1e-9);
    CHECK(std::abs(plane.a[1]) < 1e-9);
    CHECK(std::abs(plane.b) < 1e-9);
  }

  const auto planes = build_tangent_planes(parse("x1^2", 1), 0.0, Box({0.0}, {1.0}), 2);
  REQUIRE(planes.size() == 2);
  CHECK(std::abs(planes[0].a[0] - 0.0) < 1e-6);
  CHECK(std::abs(planes[0].b - 0.0) < 1e-6);
  CHECK(std::abs(planes[1].a[0] - 2.0) < 1e-6);
  CHECK(std::abs(planes[1].b + 1.0) < 1e-6);

  for (const auto& plane : build_tangent_planes(parse("4.5", 2), 0.0, square, 3)) {
    CHECK(plane.a[0] == 0.0);
    CHECK(plane.a[1] == 0.0);
    CHECK(plane.b == 4.5);
  }
}

TEST_CASE("build_tangent_planes guards") {
  CHECK_THROWS_AS(build_tangent_planes(parse("x1", 1), 0.0, Box({0.0}, {1.0}), 1), std::invalid_argument);
  CHECK_THROWS_AS(build_tangent_planes(parse("x1", 1), -1.0, Box({0.0}, {1.0}), 3), std::invalid_argument);
  const Box big(std::vector<double>(3, 0.0), std::vector<double>(3, 1.0));
  CHECK_THROWS_AS(build_tangent_planes(parse("x1", 3), 0.0, big, 101), GuardError);
  const Box seven(std::vector<double>(7, 0.0), std::vector<double>(7, 1.0));
  CHECK_THROWS_AS(build_tangent_planes(parse("x1", 7), 0.0, seven, 2), GuardError);
}

TEST_CASE("build_c2: exact reproduction of a concave quadratic") {
  const Expr f = parse("-(x1^2+x2^2)", 2);
  const Box square({-1.0, -1.0}, {1.0, 1.0});
  const DcModel m = build_c2(f, square, {1.0, 5});
  for (const auto& piece : m.p.pieces()) {
    CHECK(piece.d == std::vector<double>{-1.0, -1.0});
  }
  const ErrorReport r = sup_error(f, m.p, TensorGrid::uniform(square, 101));
  CHECK(r.max_abs_error <= 1e-9);
}

TEST_CASE("build_c2: constant target") {
  const Expr f = parse("2.5", 2);
  const Box square({0.0, 0.0}, {1.0, 1.0});
  const DcModel m = build_c2(f, square, {0.0, 3});
  const ErrorReport r = sup_error(f, m.p, TensorGrid::uniform(square, 51));
  CHECK(r.max_abs_error == 0.0);
}

TEST_CASE("build_c2: paraboloid on an 11x11 grid") {
  // per-axis tangent gap of x^2 between nodes h apart peaks at h^2/4
  const Expr f = parse("x1^2 + x2^2", 2);
  const Box square({0.0, 0.0}, {1.0, 1.0});
  const DcModel m = build_c2(f, square, {0.0, 11});
  CHECK(m.p.size() == 121);
  double worst = 0.0;
  for (int i = 0; i <= 200; ++i) {
    for (int j = 0; j <= 200; ++j) {
      const std::vector<double> x{i / 200.0, j / 200.0};
      worst = std::max(worst, std::abs(x[0] * x[0] + x[1] * x[1] - eval_pwc(m.p, x).value));
    }
  }
  CHECK(worst <= 0.006);
  CHECK(worst == doctest::Approx(2 * 0.01 / 4).epsilon(1e-3));
}

TEST_CASE("invariants: underestimation, node interpolation, decomposition identity") {
  const Expr f = parse("sin(x1)*cos(x2) + 0.3*x1*x2", 2);
  const Box box({-1.0, -1.5}, {1.5, 1.0});
  const MuEstimate est = estimate_mu(f, box, 21, 1.1);
  const DcModel m = build_c2(f, box, {est.mu, 9});

  // f_cvx must be convex on the sample set for the conditional check to apply
  const TensorGrid curvature = TensorGrid::uniform(box, 15);
  std::vector<double> x;
  const ScalarField f_cvx = [&](std::span<const double> p) { return convexified_value(f, est.mu, p); };
  for (std::size_t k = 0; k < curvature.size(); ++k) {
    curvature.point(k, x);
    REQUIRE(min_eigenvalue(hessian_fd(f_cvx, x), 2) >= -1e-6);
  }

  const TensorGrid dense = TensorGrid::uniform(box, 81);
  for (std::size_t k = 0; k < dense.size(); ++k) {
    dense.point(k, x);
    REQUIRE(eval_pwc(m.p, x).value <= f(x) + 1e-6);
  }

  const TensorGrid nodes = TensorGrid::uniform(box, 9);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    nodes.point(k, x);
    CHECK(std::abs(eval_pwc(m.p, x).value - f(x)) <= 1e-6);
  }

  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    const std::vector<double> p{u(rng), u(rng)};
    const double sq = p[0] * p[0] + p[1] * p[1];
    const double recombined = convexified_value(f, est.mu, p) + (-est.mu * sq);
    CHECK(std::abs(recombined - f(p)) <= 1e-12 * std::max(1.0, std::abs(f(p)) + est.mu * sq));
  }
}

TEST_CASE("refinement: doubling the cell count never increases the error on convex targets") {
  // grids of 2g-1 points contain the nodes of g points, so the plane families nest
  for (const char* text : {"x1^2 + x2^2", "exp(x1) + x2^4", "sin(x1)*cos(x2)"}) {
    const Expr f = parse(text, 2);
    const Box box({0.1, -0.9}, {1.2, 0.7});
    const double mu = estimate_mu(f, box, 11, 1.2).mu;
    const TensorGrid dense = TensorGrid::uniform(box, 121);
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t g : {3, 5, 9, 17}) {
      const double err = sup_error(f, build_c2(f, box, {mu, g}).p, dense).max_abs_error;
      CHECK(err <= previous + 1e-9);
      previous = err;
    }
  }
}

TEST_CASE("fit_c2 grows the grid until the target is met") {
  const Expr f = parse("x1^2 + x2^2", 2);
  const Box square({0.0, 0.0}, {1.0, 1.0});
  const C2Fit fit = fit_c2(f, square, {0.0, 3}, 10, 0.001);
  CHECK(fit.report.bound_satisfied);
  CHECK(fit.report.max_abs_error <= 0.001);
  // exact gap is 2 (1/(g-1))^2 / 4 <= 0.001  =>  g - 1 >= sqrt(500) ~ 22.4
  CHECK(fit.model.params.grid_per_axis == 24);
  CHECK(fit.tried.front() == 3);
}
