#pragma once

#include <cstddef>

#include "pwcc/core.hpp"
#include "pwcc/expr.hpp"

namespace pwcc {

/// Positive Lipschitz modulus.
class LipschitzConstant {
 public:
  explicit LipschitzConstant(double kappa);
  double value() const noexcept { return kappa_; }

 private:
  double kappa_;
};

/// Raised when a construction would exceed a size guard.
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMaxSubintervals = 100'000'000;

/// Uniform partition of [lower, upper] into n_p subintervals of width delta.
/// Subintervals are indexed 0..n_p-1; subinterval i spans [node(i), node(i+1)].
struct UniGrid {
  double lower = 0.0;
  double upper = 1.0;
  double delta = 1.0;
  std::size_t n_p = 1;

  /// node(0) == lower and node(n_p) == upper exactly.
  double node(std::size_t i) const;
  double midpoint(std::size_t i) const;
};

/// Target width eps / (2.5 kappa), rounded down so that an integer number of
/// subintervals covers the interval. Throws GuardError past kMaxSubintervals.
UniGrid build_grid(double lower, double upper, double eps, LipschitzConstant kappa);

/// The concave parabola for subinterval i: matches f at the midpoint and has
/// slope +2 kappa at the left node and -2 kappa at the right node.
DiagQuadPiece build_piece(const Expr& f, const UniGrid& grid, std::size_t i,
                          LipschitzConstant kappa);

/// Closed-form coefficients from the subinterval ends and the midpoint value.
DiagQuadPiece parabola_coefficients(double left, double right, double kappa, double mid_value);

struct UnivariateModel {
  PwcFunction p;
  UniGrid grid;
  double kappa;
  double eps;
};

/// f must be univariate (dimension 1).
UnivariateModel build_univariate(const Expr& f, double lower, double upper,
                                 LipschitzConstant kappa, double eps);

}  // namespace pwcc
