#include "pwcc/univariate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace pwcc {

LipschitzConstant::LipschitzConstant(double kappa) : kappa_(kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw std::invalid_argument("Lipschitz constant must be positive and finite");
  }
}

double UniGrid::node(std::size_t i) const {
  if (i >= n_p) return upper;
  return lower + static_cast<double>(i) * delta;
}

double UniGrid::midpoint(std::size_t i) const { return node(i) + 0.5 * delta; }

UniGrid build_grid(double lower, double upper, double eps, LipschitzConstant kappa) {
  if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper)) {
    throw std::invalid_argument("grid needs finite bounds with lower < upper");
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("eps must be positive");

  const double target = eps / (2.5 * kappa.value());
  const double count = std::ceil((upper - lower) / target);
  if (!(count <= static_cast<double>(kMaxSubintervals))) {
    throw GuardError("grid would need " + std::to_string(count) + " subintervals (limit " +
                     std::to_string(kMaxSubintervals) + ")");
  }
  UniGrid grid;
  grid.lower = lower;
  grid.upper = upper;
  grid.n_p = std::max<std::size_t>(1, static_cast<std::size_t>(count));
  grid.delta = (upper - lower) / static_cast<double>(grid.n_p);
  return grid;
}

namespace {

DiagQuadPiece coefficients(double left, double right, double dx, double kappa, double mid_value) {
  DiagQuadPiece piece;
  piece.d = {-2.0 * kappa / dx};
  piece.a = {-2.0 * kappa * (1.0 - 2.0 * right / dx)};
  piece.b = -2.0 * kappa * left * left / dx - 0.5 * kappa * dx - 2.0 * kappa * left + mid_value;
  return piece;
}

}  // namespace

DiagQuadPiece parabola_coefficients(double left, double right, double kappa, double mid_value) {
  return coefficients(left, right, right - left, kappa, mid_value);
}

DiagQuadPiece build_piece(const Expr& f, const UniGrid& grid, std::size_t i,
                          LipschitzConstant kappa) {
  if (i >= grid.n_p) throw std::out_of_range("subinterval index outside grid");
  const double left = grid.node(i);
  const double right = left + grid.delta;
  return coefficients(left, right, grid.delta, kappa.value(), f(grid.midpoint(i)));
}

UnivariateModel build_univariate(const Expr& f, double lower, double upper,
                                 LipschitzConstant kappa, double eps) {
  if (f.dimension() != 1) throw std::invalid_argument("univariate builder needs a 1-D function");
  UniGrid grid = build_grid(lower, upper, eps, kappa);
  std::vector<DiagQuadPiece> pieces;
  pieces.reserve(grid.n_p);
  for (std::size_t i = 0; i < grid.n_p; ++i) pieces.push_back(build_piece(f, grid, i, kappa));
  return {PwcFunction(std::move(pieces), Box({lower}, {upper})), grid, kappa.value(), eps};
}

}  // namespace pwcc
